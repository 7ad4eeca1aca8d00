"""Oscillation-norm estimators over sampled cube families.

Seven estimators share one CubeFamily so their values are comparable on a
fixed term population:

    bmo_classical  - Lebesgue baseline with a configurable large-cube cutoff
    rbmo_global    - oscillation about the doubling-expansion mean on every
                     cube plus coefficient-controlled mean jumps on doubling
                     pairs (no absolute-average condition)
    rbmo_yang      - local variant: small-cube oscillation, doubling pairs
                     with small left member, absolute averages on l > 1
    rbmo1..rbmo4   - four local variants differing in cube families, witness
                     numbers and doubling restrictions

All estimators are lower bounds of the corresponding supremum over all
cubes, except rbmo2 which evaluates one fixed admissible witness and is
therefore an upper-bound-flavored evaluation of an infimum; reports label
each estimate accordingly.

Zero-mass conventions: any term normalized by the mass of the eta-expansion
contributes 0 when that mass vanishes, and pairs with a zero-mass member
are skipped.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    FamilyMismatchError,
    InadmissibleCenterError,
    InvalidInputError,
    InvalidUseError,
    SearchFailureError,
    ZeroMassMeanError,
)
from .geometry import (
    Cube,
    biggest_doubling_contraction,
    contains,
    smallest_doubling_expansion,
)
from .kcoeff import k_coefficient
from .measure import (
    DoublingConfig,
    GridMeasure,
    cell_index_of,
    integrate_abs_deviation,
    integrate_centered,
    measure_of_cube,
)

#: Sampled side lengths must stay at least this far from the unit threshold
#: so the exact <= comparisons never sit on the boundary.
UNIT_GAP = 1e-9


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Piecewise-constant function on the same grid as a measure."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("function values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def ess_sup(self, m: GridMeasure) -> float:
        """Largest |value| over cells carrying positive density."""
        mask = m.density > 0.0
        if not mask.any():
            return 0.0
        return float(np.abs(self.values[mask]).max())

    def scaled(self, factor: float) -> "GridFunction":
        return GridFunction(self.values * factor)

    def to_dict(self) -> dict:
        return {"values": self.values.ravel().tolist()}


def load_function(path, m: GridMeasure) -> GridFunction:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return function_from_dict(data, m)


def function_from_dict(data: dict, m: GridMeasure) -> GridFunction:
    if "values" not in data:
        raise InvalidInputError("function spec needs a 'values' array")
    vals = np.asarray(data["values"], dtype=np.float64)
    if vals.size != int(np.prod(m.cells)):
        raise InvalidInputError(
            f"function has {vals.size} values but the grid has {int(np.prod(m.cells))} cells"
        )
    return GridFunction(vals.reshape(m.cells))


# ------------------------------------------------------------------ family

@dataclass(frozen=True)
class FamilyParams:
    """Sampling plan for a cube family.

    Sides live on the geometric ladder base_side * alpha^j; centers sit on a
    jittered sub-grid.  ``refine`` appends extra sampling levels so a
    refined family is a strict superset of the base one.
    """

    centers_per_axis: int = 10
    jitter: float = 0.35
    base_side: float = 0.4
    ladder_lo: int = -3
    ladder_hi: int = 4
    chain_offsets: tuple[int, ...] = (1, 2)
    offcenter_pairs: int = 2
    refine: int = 1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "chain_offsets", tuple(int(j) for j in self.chain_offsets))
        if self.centers_per_axis < 1:
            raise InvalidInputError("centers_per_axis must be at least 1")
        if not 0.0 <= self.jitter <= 1.0:
            raise InvalidInputError("jitter must lie in [0, 1]")
        if not self.base_side > 0.0:
            raise InvalidInputError("base_side must be positive")
        if self.ladder_lo > self.ladder_hi:
            raise InvalidInputError("empty side ladder")
        if any(j < 1 for j in self.chain_offsets):
            raise InvalidInputError("chain offsets must be positive")
        if self.offcenter_pairs < 0:
            raise InvalidInputError("offcenter_pairs must be nonnegative")
        if self.refine < 1:
            raise InvalidInputError("refine must be at least 1")
        if self.seed < 0:
            raise InvalidInputError("seed must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "centers_per_axis": self.centers_per_axis,
            "jitter": self.jitter,
            "base_side": self.base_side,
            "ladder_lo": self.ladder_lo,
            "ladder_hi": self.ladder_hi,
            "chain_offsets": list(self.chain_offsets),
            "offcenter_pairs": self.offcenter_pairs,
            "refine": self.refine,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FamilyParams":
        known = {f: data[f] for f in data if f in cls.__dataclass_fields__}
        if "chain_offsets" in known:
            known["chain_offsets"] = tuple(known["chain_offsets"])
        return cls(**known)


@dataclass(frozen=True)
class CubeRecord:
    """A retained family cube with its doubling data and classification."""

    cube: Cube
    tilde: Cube
    tilde_exponent: int
    is_doubling: bool
    in_q: bool
    in_q_ex: bool
    prime: Cube | None = None
    prime_exponent: int | None = None

    @property
    def key(self) -> tuple:
        return self.cube.key


@dataclass(frozen=True)
class PairRecord:
    """Nested cube pair; containment verified at construction time."""

    small: CubeRecord
    big: CubeRecord
    kind: str

    @property
    def both_doubling(self) -> bool:
        return self.small.is_doubling and self.big.is_doubling


@dataclass
class CubeFamily:
    """Sampled cubes and nested pairs, the finite stand-in for 'any cube'."""

    records: tuple[CubeRecord, ...]
    pairs: tuple[PairRecord, ...]
    params: FamilyParams
    alpha: float
    beta: float
    measure_fingerprint: str
    excluded_count: int

    @property
    def seed(self) -> int:
        return self.params.seed

    @cached_property
    def small_cubes(self) -> tuple[CubeRecord, ...]:
        return tuple(r for r in self.records if r.in_q)

    @cached_property
    def large_cubes(self) -> tuple[CubeRecord, ...]:
        return tuple(r for r in self.records if not r.in_q)

    @cached_property
    def boundary_cubes(self) -> tuple[CubeRecord, ...]:
        return tuple(r for r in self.records if r.in_q_ex and not r.in_q)

    @cached_property
    def doubling_pairs(self) -> tuple[PairRecord, ...]:
        return tuple(p for p in self.pairs if p.both_doubling)

    def fingerprint(self) -> dict:
        payload = json.dumps(
            {"params": self.params.to_dict(), "alpha": self.alpha, "beta": self.beta},
            sort_keys=True,
        )
        return {
            "seed": self.seed,
            "params_hash": hashlib.sha256(payload.encode()).hexdigest()[:16],
            "measure": self.measure_fingerprint,
            "cubes": len(self.records),
            "pairs": len(self.pairs),
            "excluded_centers": self.excluded_count,
        }


class _RecordBuilder:
    """Builds CubeRecords with deduplication and exclusion counting."""

    def __init__(self, m: GridMeasure, cfg: DoublingConfig):
        self.m = m
        self.cfg = cfg
        self.cache: dict[tuple, CubeRecord | None] = {}
        self.excluded = 0

    def build(self, cube: Cube) -> CubeRecord | None:
        key = cube.key
        if key in self.cache:
            return self.cache[key]
        record = None
        try:
            tilde, t_exp = smallest_doubling_expansion(self.m, cube, self.cfg)
            small = cube.side <= 1.0
            prime = prime_exp = None
            if small:
                qex = True
            else:
                prime, prime_exp = biggest_doubling_contraction(self.m, cube, self.cfg)
                qex = prime.side <= 1.0
            record = CubeRecord(
                cube=cube,
                tilde=tilde,
                tilde_exponent=t_exp,
                is_doubling=(t_exp == 0),
                in_q=small,
                in_q_ex=qex,
                prime=prime,
                prime_exponent=prime_exp,
            )
        except (InadmissibleCenterError, SearchFailureError):
            self.excluded += 1
        self.cache[key] = record
        return record


def _safe_ladder(m: GridMeasure, params: FamilyParams, alpha: float) -> list[float]:
    """Geometric side ladder with every chain power kept clear of 1.0."""
    base = params.base_side
    span = min(h - l for l, h in zip(m.box_lo, m.box_hi))

    def clear(b: float) -> bool:
        for j in range(-60, 61):
            s = b * alpha**j
            if abs(s - 1.0) < UNIT_GAP:
                return False
        return True

    while not clear(base):
        base *= 1.0000001
    sides = [
        base * alpha**j
        for j in range(params.ladder_lo, params.ladder_hi + 1)
    ]
    return [s for s in sides if m.resolution <= s <= 2.0 * span]


def sample_family(m: GridMeasure, cfg: DoublingConfig, params: FamilyParams) -> CubeFamily:
    """Deterministic cube family on a measure.

    Centers lie on a jittered sub-grid, sides on the ladder.  Pairs come
    from (a) chain pairs mapped through the doubling expansion and (b)
    off-center nested sub-cubes, both kept in raw form too so conditions
    ranging over general (not necessarily doubling) pairs have instances.
    Cubes whose contraction search hits the resolution floor are excluded
    and counted.  Families built with a higher ``refine`` extend lower ones.
    """
    if m.dimension != cfg.d:
        raise InvalidInputError("measure dimension does not match configuration")
    builder = _RecordBuilder(m, cfg)
    sides = _safe_ladder(m, params, cfg.alpha)
    if not sides:
        raise InvalidInputError("side ladder is empty after resolution clamping")
    g = params.centers_per_axis
    d = m.dimension
    spacing = [(h - l) / g for l, h in zip(m.box_lo, m.box_hi)]

    records: list[CubeRecord] = []
    seen_records: set[tuple] = set()
    pairs: list[PairRecord] = []
    seen_pairs: set[tuple] = set()

    def keep_record(rec: CubeRecord | None):
        if rec is not None and rec.key not in seen_records:
            seen_records.add(rec.key)
            records.append(rec)

    def keep_pair(small: CubeRecord, big: CubeRecord, kind: str):
        if small.cube.side >= big.cube.side:
            return
        if not contains(small.cube, big.cube):
            return
        key = (small.key, big.key)
        if key in seen_pairs:
            return
        seen_pairs.add(key)
        pairs.append(PairRecord(small=small, big=big, kind=kind))

    for level in range(params.refine):
        rng = np.random.default_rng(np.random.SeedSequence((params.seed, 997, level)))
        shift = (level * 0.381966011250105) % 1.0
        base_centers = []
        axes = [
            [m.box_lo[ax] + spacing[ax] * (i + 0.5 + (shift if level else 0.0)) for i in range(g)]
            for ax in range(d)
        ]
        grid = np.meshgrid(*[np.asarray(a) for a in axes], indexing="ij")
        base_centers = np.stack([gax.ravel() for gax in grid], axis=1)
        jit = rng.uniform(-0.5, 0.5, size=base_centers.shape) * params.jitter
        centers = base_centers + jit * np.asarray(spacing)
        centers = np.clip(centers, m.box_lo, m.box_hi)

        for ci, center in enumerate(centers):
            center_t = tuple(float(x) for x in center)
            for si, side in enumerate(sides):
                base_rec = builder.build(Cube(center_t, side))
                if base_rec is None:
                    continue
                keep_record(base_rec)
                tilde_rec = builder.build(base_rec.tilde)
                if tilde_rec is not None:
                    keep_record(tilde_rec)

                for off in params.chain_offsets:
                    big_rec = builder.build(base_rec.cube.scaled(cfg.alpha**off))
                    if big_rec is None:
                        continue
                    keep_record(big_rec)
                    keep_pair(base_rec, big_rec, "chain")
                    big_tilde = builder.build(big_rec.tilde)
                    if big_tilde is not None and tilde_rec is not None:
                        keep_record(big_tilde)
                        keep_pair(tilde_rec, big_tilde, "chain-mapped")

                sub_rng = np.random.default_rng(
                    np.random.SeedSequence((params.seed, 331, level, ci, si))
                )
                for _ in range(params.offcenter_pairs):
                    k = int(sub_rng.integers(1, 3))
                    sub_side = side * cfg.alpha**-k
                    offsets = sub_rng.uniform(-0.5, 0.5, size=d) * (side - sub_side)
                    if sub_side < m.resolution:
                        continue
                    sub_center = tuple(float(c + o) for c, o in zip(center_t, offsets))
                    sub_rec = builder.build(Cube(sub_center, sub_side))
                    if sub_rec is None:
                        continue
                    keep_record(sub_rec)
                    keep_pair(sub_rec, base_rec, "offcenter")
                    sub_tilde = builder.build(sub_rec.tilde)
                    if sub_tilde is not None and tilde_rec is not None:
                        keep_record(sub_tilde)
                        keep_pair(sub_tilde, tilde_rec, "offcenter-mapped")

    return CubeFamily(
        records=tuple(records),
        pairs=tuple(pairs),
        params=params,
        alpha=cfg.alpha,
        beta=cfg.beta,
        measure_fingerprint=m.fingerprint,
        excluded_count=builder.excluded,
    )


def family_from_cubes(
    m: GridMeasure,
    cfg: DoublingConfig,
    cubes,
    pair_indices=(),
    params: FamilyParams | None = None,
) -> CubeFamily:
    """Family over an explicit cube list; pairs given as (small_i, big_i)."""
    builder = _RecordBuilder(m, cfg)
    records = []
    by_index = {}
    for i, cube in enumerate(cubes):
        rec = builder.build(cube)
        by_index[i] = rec
        if rec is not None:
            records.append(rec)
    pairs = []
    for i, j in pair_indices:
        small, big = by_index.get(i), by_index.get(j)
        if small is None or big is None:
            continue
        if small.cube.side >= big.cube.side or not contains(small.cube, big.cube):
            raise InvalidInputError(f"pair ({i}, {j}) is not properly nested")
        pairs.append(PairRecord(small=small, big=big, kind="explicit"))
    return CubeFamily(
        records=tuple(records),
        pairs=tuple(pairs),
        params=params or FamilyParams(),
        alpha=cfg.alpha,
        beta=cfg.beta,
        measure_fingerprint=m.fingerprint,
        excluded_count=builder.excluded,
    )


# ------------------------------------------------------------- evaluation

def mean(m: GridMeasure, f: GridFunction, q: Cube) -> float:
    """Mass-weighted mean of f over the cube.

    Computed about a pivot cell value so constant functions average to the
    constant exactly.  Raises ZeroMassMeanError on zero-mass cubes.
    """
    mass = measure_of_cube(m, q)
    if mass == 0.0:
        raise ZeroMassMeanError(f"cube at {q.center} with side {q.side} has zero mass")
    pivot = float(f.values[cell_index_of(m, q.center)])
    return pivot + integrate_centered(m, f.values, q, pivot) / mass


def oscillation_term(
    m: GridMeasure, f: GridFunction, q: Cube, center_value: float, cfg: DoublingConfig
) -> float:
    """Average |f - center_value| over q, normalized by the eta-expansion mass.

    Zero when the expansion carries no mass (then so does q and the
    integral vanishes).
    """
    eta_mass = measure_of_cube(m, q.scaled(cfg.eta))
    if eta_mass == 0.0:
        return 0.0
    return integrate_abs_deviation(m, f.values, q, center_value) / eta_mass


class FamilyEvaluation:
    """Caching context shared by the estimators for one (m, f, family, cfg).

    Masses, means, deviation integrals and pair coefficients are memoized so
    the seven estimators price each family term once.  Reductions are plain
    maxima, so results do not depend on evaluation order.
    """

    def __init__(self, m: GridMeasure, f: GridFunction, family: CubeFamily, cfg: DoublingConfig):
        if family.measure_fingerprint != m.fingerprint:
            raise FamilyMismatchError("family was built on a different measure")
        if family.alpha != cfg.alpha or family.beta != cfg.beta:
            raise FamilyMismatchError("family was built with different alpha/beta")
        if f.values.shape != m.cells:
            raise FamilyMismatchError("function grid does not match the measure grid")
        self.m = m
        self.f = f
        self.family = family
        self.cfg = cfg
        self._mass: dict[tuple, float] = {}
        self._mean: dict[tuple, float] = {}
        self._absdev: dict[tuple, float] = {}
        self._k: dict[tuple, float] = {}

    def mass(self, q: Cube) -> float:
        key = q.key
        got = self._mass.get(key)
        if got is None:
            got = measure_of_cube(self.m, q)
            self._mass[key] = got
        return got

    def eta_mass(self, q: Cube) -> float:
        return self.mass(q.scaled(self.cfg.eta))

    def mean(self, q: Cube) -> float:
        key = q.key
        got = self._mean.get(key)
        if got is None:
            mass = self.mass(q)
            if mass == 0.0:
                raise ZeroMassMeanError(f"zero-mass mean at {key}")
            pivot = float(self.f.values[cell_index_of(self.m, q.center)])
            got = pivot + integrate_centered(self.m, self.f.values, q, pivot) / mass
            self._mean[key] = got
        return got

    def absdev(self, q: Cube, shift: float) -> float:
        key = (q.key, shift)
        got = self._absdev.get(key)
        if got is None:
            got = integrate_abs_deviation(self.m, self.f.values, q, shift)
            self._absdev[key] = got
        return got

    def k_value(self, q: Cube, r: Cube) -> float:
        key = (q.key, r.key)
        got = self._k.get(key)
        if got is None:
            got = k_coefficient(self.m, q, r, self.cfg, mass_fn=self.mass).value
            self._k[key] = got
        return got

    @cached_property
    def ess_sup(self) -> float:
        return self.f.ess_sup(self.m)


@dataclass
class NormEntry:
    """One definition's estimate with per-condition suprema and witnesses."""

    name: str
    estimate: float
    kind: str
    suprema: dict[str, float]
    argmax: dict[str, object]
    term_counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "estimate": self.estimate,
            "kind": self.kind,
            "suprema": self.suprema,
            "argmax": self.argmax,
            "term_counts": self.term_counts,
        }


class _Sup:
    """Running maximum with argmax descriptor and term count."""

    def __init__(self):
        self.value = 0.0
        self.arg = None
        self.count = 0

    def offer(self, value: float, descriptor):
        self.count += 1
        if value > self.value:
            self.value = value
            self.arg = descriptor

    def close(self):
        if self.arg is not None and not isinstance(self.arg, dict):
            self.arg = self.arg()
        return self


def _cube_desc(rec: CubeRecord) -> dict:
    return {"kind": "cube", "center": list(rec.cube.center), "side": rec.cube.side}


def _pair_desc(pair: PairRecord) -> dict:
    return {
        "kind": "pair",
        "small": {"center": list(pair.small.cube.center), "side": pair.small.cube.side},
        "big": {"center": list(pair.big.cube.center), "side": pair.big.cube.side},
    }


def _entry(name: str, kind: str, sups: dict[str, _Sup]) -> NormEntry:
    for s in sups.values():
        s.close()
    return NormEntry(
        name=name,
        estimate=max((s.value for s in sups.values()), default=0.0),
        kind=kind,
        suprema={k: s.value for k, s in sups.items()},
        argmax={k: s.arg for k, s in sups.items() if s.arg is not None},
        term_counts={k: s.count for k, s in sups.items()},
    )


def _ctx(m, f, family, cfg, ctx):
    return ctx if ctx is not None else FamilyEvaluation(m, f, family, cfg)


def rbmo1_norm(m, f, family, cfg, ctx=None) -> NormEntry:
    """Small-cube oscillation about the expansion mean, coefficient-scaled
    mean jumps on doubling pairs (small left member, right member with unit
    contraction), absolute averages on the boundary cubes."""
    ctx = _ctx(m, f, family, cfg, ctx)
    t1, t2, t3 = _Sup(), _Sup(), _Sup()
    for rec in family.small_cubes:
        if ctx.mass(rec.cube) == 0.0:
            continue
        em = ctx.eta_mass(rec.cube)
        if em == 0.0:
            continue
        t1.offer(ctx.absdev(rec.cube, ctx.mean(rec.tilde)) / em, lambda r=rec: _cube_desc(r))
    for pair in family.pairs:
        if not (pair.both_doubling and pair.small.in_q and pair.big.in_q_ex):
            continue
        if ctx.mass(pair.small.cube) == 0.0 or ctx.mass(pair.big.cube) == 0.0:
            continue
        gap = abs(ctx.mean(pair.small.cube) - ctx.mean(pair.big.cube))
        t2.offer(gap / ctx.k_value(pair.small.cube, pair.big.cube), lambda p=pair: _pair_desc(p))
    for rec in family.boundary_cubes:
        em = ctx.eta_mass(rec.cube)
        if em == 0.0:
            continue
        t3.offer(ctx.absdev(rec.cube, 0.0) / em, lambda r=rec: _cube_desc(r))
    return _entry("rbmo1", "family-lower-bound", {"oscillation": t1, "pairs": t2, "absolute": t3})


def rbmo_yang_norm(m, f, family, cfg, ctx=None) -> NormEntry:
    """As rbmo1 but pairs only need a small left member and the absolute
    condition runs over every large cube."""
    ctx = _ctx(m, f, family, cfg, ctx)
    t1, t2, t3 = _Sup(), _Sup(), _Sup()
    for rec in family.small_cubes:
        if ctx.mass(rec.cube) == 0.0:
            continue
        em = ctx.eta_mass(rec.cube)
        if em == 0.0:
            continue
        t1.offer(ctx.absdev(rec.cube, ctx.mean(rec.tilde)) / em, lambda r=rec: _cube_desc(r))
    for pair in family.pairs:
        if not (pair.both_doubling and pair.small.in_q):
            continue
        if ctx.mass(pair.small.cube) == 0.0 or ctx.mass(pair.big.cube) == 0.0:
            continue
        gap = abs(ctx.mean(pair.small.cube) - ctx.mean(pair.big.cube))
        t2.offer(gap / ctx.k_value(pair.small.cube, pair.big.cube), lambda p=pair: _pair_desc(p))
    for rec in family.large_cubes:
        em = ctx.eta_mass(rec.cube)
        if em == 0.0:
            continue
        t3.offer(ctx.absdev(rec.cube, 0.0) / em, lambda r=rec: _cube_desc(r))
    return _entry("rbmo_yang", "family-lower-bound", {"oscillation": t1, "pairs": t2, "absolute": t3})


def rbmo_global_norm(m, f, family, cfg, ctx=None) -> NormEntry:
    """Oscillation about the expansion mean over every family cube plus
    coefficient-scaled mean jumps over all doubling pairs."""
    ctx = _ctx(m, f, family, cfg, ctx)
    t1, t2 = _Sup(), _Sup()
    for rec in family.records:
        if ctx.mass(rec.cube) == 0.0:
            continue
        em = ctx.eta_mass(rec.cube)
        if em == 0.0:
            continue
        t1.offer(ctx.absdev(rec.cube, ctx.mean(rec.tilde)) / em, lambda r=rec: _cube_desc(r))
    for pair in family.pairs:
        if not pair.both_doubling:
            continue
        if ctx.mass(pair.small.cube) == 0.0 or ctx.mass(pair.big.cube) == 0.0:
            continue
        gap = abs(ctx.mean(pair.small.cube) - ctx.mean(pair.big.cube))
        t2.offer(gap / ctx.k_value(pair.small.cube, pair.big.cube), lambda p=pair: _pair_desc(p))
    return _entry("rbmo_global", "family-lower-bound", {"oscillation": t1, "pairs": t2})


@dataclass
class WitnessAssignment:
    """Per-cube witness numbers used by the rbmo2 evaluation."""

    values: dict[tuple, float]

    def value_for(self, rec: CubeRecord) -> float:
        return self.values[rec.key]

    def to_list(self) -> list[dict]:
        return [
            {"center": list(center), "side": side, "value": v}
            for (center, side), v in sorted(self.values.items())
        ]


def _witness_value(ctx: FamilyEvaluation, rec: CubeRecord) -> float:
    """Proof witness: the expansion mean when the expansion is small, else 0.

    Zero-mass expansions get witness 0; any number is admissible on a null
    cube and 0 keeps the boundary condition tight.
    """
    if rec.tilde.side <= 1.0 and ctx.mass(rec.tilde) > 0.0:
        return ctx.mean(rec.tilde)
    return 0.0


def rbmo2_norm(m, f, family, cfg, ctx=None) -> tuple[NormEntry, WitnessAssignment]:
    """Witness-number variant evaluated at the fixed proof witness.

    The true norm is an infimum over witness collections; this evaluates
    one admissible collection, so it is an upper-bound-flavored reading and
    the entry is labeled 'witness-evaluation'.  Pair terms range over all
    nested pairs with the required family flags, doubling or not.
    """
    ctx = _ctx(m, f, family, cfg, ctx)
    witness: dict[tuple, float] = {}

    def w(rec: CubeRecord) -> float:
        key = rec.key
        if key not in witness:
            witness[key] = _witness_value(ctx, rec)
        return witness[key]

    t1, t2, t3 = _Sup(), _Sup(), _Sup()
    for rec in family.small_cubes:
        if ctx.mass(rec.cube) == 0.0:
            continue
        em = ctx.eta_mass(rec.cube)
        if em == 0.0:
            continue
        t1.offer(ctx.absdev(rec.cube, w(rec)) / em, lambda r=rec: _cube_desc(r))
    for pair in family.pairs:
        if not (pair.small.in_q and pair.big.in_q_ex):
            continue
        if ctx.mass(pair.small.cube) == 0.0 or ctx.mass(pair.big.cube) == 0.0:
            continue
        gap = abs(w(pair.small) - w(pair.big))
        t2.offer(gap / ctx.k_value(pair.small.cube, pair.big.cube), lambda p=pair: _pair_desc(p))
    for rec in family.boundary_cubes:
        t3.offer(abs(w(rec)), lambda r=rec: _cube_desc(r))
    for rec in family.records:
        w(rec)
    entry = _entry(
        "rbmo2", "witness-evaluation", {"oscillation": t1, "pairs": t2, "absolute": t3}
    )
    return entry, WitnessAssignment(values=witness)


def rbmo3_norm(m, f, family, cfg, ctx=None) -> NormEntry:
    """Oscillation about the cube's own mean; pair condition over all nested
    pairs with the mean jump divided by the coefficient times the mass
    concentration bracket of the two members."""
    ctx = _ctx(m, f, family, cfg, ctx)
    t1, t2, t3 = _Sup(), _Sup(), _Sup()
    for rec in family.small_cubes:
        mq = ctx.mass(rec.cube)
        if mq == 0.0:
            continue
        em = ctx.eta_mass(rec.cube)
        if em == 0.0:
            continue
        t1.offer(ctx.absdev(rec.cube, ctx.mean(rec.cube)) / em, lambda r=rec: _cube_desc(r))
    for pair in family.pairs:
        if not (pair.small.in_q and pair.big.in_q_ex):
            continue
        ms, mb = ctx.mass(pair.small.cube), ctx.mass(pair.big.cube)
        if ms == 0.0 or mb == 0.0:
            continue
        bracket = ctx.eta_mass(pair.small.cube) / ms + ctx.eta_mass(pair.big.cube) / mb
        gap = abs(ctx.mean(pair.small.cube) - ctx.mean(pair.big.cube))
        t2.offer(
            gap / (ctx.k_value(pair.small.cube, pair.big.cube) * bracket),
            lambda p=pair: _pair_desc(p),
        )
    for rec in family.boundary_cubes:
        em = ctx.eta_mass(rec.cube)
        if em == 0.0:
            continue
        t3.offer(ctx.absdev(rec.cube, 0.0) / em, lambda r=rec: _cube_desc(r))
    return _entry("rbmo3", "family-lower-bound", {"oscillation": t1, "pairs": t2, "absolute": t3})


def rbmo4_norm(m, f, family, cfg, ctx=None) -> NormEntry:
    """Doubling-cube-only variant normalized by the cube's own mass."""
    ctx = _ctx(m, f, family, cfg, ctx)
    t1, t2, t3 = _Sup(), _Sup(), _Sup()
    for rec in family.small_cubes:
        if not rec.is_doubling:
            continue
        mq = ctx.mass(rec.cube)
        if mq == 0.0:
            continue
        t1.offer(ctx.absdev(rec.cube, ctx.mean(rec.cube)) / mq, lambda r=rec: _cube_desc(r))
    for pair in family.pairs:
        if not (pair.both_doubling and pair.small.in_q and pair.big.in_q_ex):
            continue
        if ctx.mass(pair.small.cube) == 0.0 or ctx.mass(pair.big.cube) == 0.0:
            continue
        gap = abs(ctx.mean(pair.small.cube) - ctx.mean(pair.big.cube))
        t2.offer(gap / ctx.k_value(pair.small.cube, pair.big.cube), lambda p=pair: _pair_desc(p))
    for rec in family.boundary_cubes:
        if not rec.is_doubling:
            continue
        mq = ctx.mass(rec.cube)
        if mq == 0.0:
            continue
        t3.offer(ctx.absdev(rec.cube, 0.0) / mq, lambda r=rec: _cube_desc(r))
    return _entry("rbmo4", "family-lower-bound", {"oscillation": t1, "pairs": t2, "absolute": t3})


_CLASSICAL_MODES = ("all-large", "unit-only", "range")


def bmo_classical_norm(
    m, f, family, mode: str = "all-large", k: float = 2.0, ctx=None
) -> NormEntry:
    """Lebesgue-baseline estimator on the uniform measure.

    Small cubes contribute mean oscillation normalized by their own mass;
    large cubes contribute absolute averages, with the population picked by
    ``mode``: every large cube, synthesized unit cubes at the family
    centers, or large cubes with side in (1, k].
    """
    if mode not in _CLASSICAL_MODES:
        raise InvalidInputError(f"mode must be one of {_CLASSICAL_MODES}")
    flat = m.density.ravel()
    if flat[0] <= 0.0 or not np.all(flat == flat[0]):
        raise InvalidUseError("the classical estimator requires the uniform preset")
    if ctx is None:
        # eta plays no role here; borrow the family's alpha/beta so the
        # shared-context validation passes.
        cfg = DoublingConfig(
            d=m.dimension,
            n=float(m.dimension),
            alpha=family.alpha,
            beta=family.beta,
            eta=min(family.alpha, 1.5),
        )
        ctx = FamilyEvaluation(m, f, family, cfg)
    t1, t2 = _Sup(), _Sup()
    for rec in family.small_cubes:
        mq = ctx.mass(rec.cube)
        if mq == 0.0:
            continue
        t1.offer(ctx.absdev(rec.cube, ctx.mean(rec.cube)) / mq, lambda r=rec: _cube_desc(r))
    if mode == "unit-only":
        seen = set()
        for rec in family.records:
            if rec.cube.center in seen:
                continue
            seen.add(rec.cube.center)
            unit = Cube(rec.cube.center, 1.0)
            mq = ctx.mass(unit)
            if mq == 0.0:
                continue
            t2.offer(
                ctx.absdev(unit, 0.0) / mq,
                lambda u=unit: {"kind": "cube", "center": list(u.center), "side": u.side},
            )
    else:
        for rec in family.large_cubes:
            if mode == "range" and not rec.cube.side <= k:
                continue
            mq = ctx.mass(rec.cube)
            if mq == 0.0:
                continue
            t2.offer(ctx.absdev(rec.cube, 0.0) / mq, lambda r=rec: _cube_desc(r))
    return _entry("bmo_classical", "family-lower-bound", {"oscillation": t1, "absolute": t2})


# ---------------------------------------------------------------- reports

ESTIMATOR_NAMES = ("bmo_classical", "rbmo_global", "rbmo_yang", "rbmo1", "rbmo2", "rbmo3", "rbmo4")

#: Definitions whose pairwise ratios the equivalence theorems control.
LOCAL_ESTIMATORS = ("rbmo1", "rbmo2", "rbmo3", "rbmo4", "rbmo_yang")


@dataclass
class NormReport:
    """All estimates of one function on one measure over a shared family."""

    entries: dict[str, NormEntry | None]
    family_fingerprint: dict
    eta: float
    notes: dict
    witness: WitnessAssignment | None = None

    def estimate(self, name: str) -> float | None:
        entry = self.entries.get(name)
        return None if entry is None else entry.estimate

    def to_dict(self, include_witness: bool = False) -> dict:
        out = {
            "entries": {k: (v.to_dict() if v is not None else None) for k, v in self.entries.items()},
            "family": self.family_fingerprint,
            "eta": self.eta,
            "notes": self.notes,
        }
        if include_witness and self.witness is not None:
            out["witness"] = self.witness.to_list()
        return out


def compute_norm_report(
    m: GridMeasure,
    f: GridFunction,
    family: CubeFamily,
    cfg: DoublingConfig,
    classical_mode: str = "all-large",
    classical_k: float = 2.0,
) -> NormReport:
    """Evaluate every estimator on the shared family.

    The classical baseline only applies to the uniform preset; on other
    measures its entry is null and a note records why.
    """
    ctx = FamilyEvaluation(m, f, family, cfg)
    notes = {}
    entries: dict[str, NormEntry | None] = {}
    flat = m.density.ravel()
    if flat[0] > 0.0 and bool(np.all(flat == flat[0])):
        entries["bmo_classical"] = bmo_classical_norm(
            m, f, family, mode=classical_mode, k=classical_k, ctx=ctx
        )
    else:
        entries["bmo_classical"] = None
        notes["bmo_classical"] = "measure is not the uniform preset"
    entries["rbmo_global"] = rbmo_global_norm(m, f, family, cfg, ctx=ctx)
    entries["rbmo_yang"] = rbmo_yang_norm(m, f, family, cfg, ctx=ctx)
    entries["rbmo1"] = rbmo1_norm(m, f, family, cfg, ctx=ctx)
    rbmo2_entry, witness = rbmo2_norm(m, f, family, cfg, ctx=ctx)
    entries["rbmo2"] = rbmo2_entry
    entries["rbmo3"] = rbmo3_norm(m, f, family, cfg, ctx=ctx)
    entries["rbmo4"] = rbmo4_norm(m, f, family, cfg, ctx=ctx)
    return NormReport(
        entries=entries,
        family_fingerprint=family.fingerprint(),
        eta=cfg.eta,
        notes=notes,
        witness=witness,
    )
