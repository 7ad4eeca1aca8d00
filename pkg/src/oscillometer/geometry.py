"""Cube arithmetic, doubling predicates and concentric doubling-cube searches.

A cube is closed and axis-parallel.  The central objects are the two
searches along a cube's concentric chain {alpha^j Q}: the smallest doubling
expansion (exponent m >= 0, the cube itself admissible) and the biggest
doubling contraction (exponent N >= 1, strict).  The asymmetric index
conventions matter: chain-sandwich properties break if either end is
shifted by one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    InadmissibleCenterError,
    InvalidInputError,
    SearchFailureError,
)
from .measure import DoublingConfig, GridMeasure, measure_of_cube

#: Default step budget for the expansion search; generous against the
#: proof-derived bound at desk-scale parameters.
DEFAULT_EXPANSION_STEPS = 64

#: Side-length comparisons against the unit threshold use exact <=; family
#: samplers keep every side at least this far from 1.0.
UNIT_THRESHOLD = 1.0


@dataclass(frozen=True)
class Cube:
    """Closed axis-parallel cube given by center and side length."""

    center: tuple[float, ...]
    side: float

    def __post_init__(self):
        center = tuple(float(x) for x in self.center)
        side = float(self.side)
        if not all(math.isfinite(x) for x in center):
            raise InvalidInputError(f"cube center must be finite, got {center}")
        if not (math.isfinite(side) and side > 0.0):
            raise InvalidInputError(f"cube side must be positive and finite, got {side}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "side", side)

    @property
    def dimension(self) -> int:
        return len(self.center)

    def scaled(self, factor: float) -> "Cube":
        """Concentric cube with side scaled by ``factor``."""
        return Cube(self.center, self.side * factor)

    def lower(self) -> tuple[float, ...]:
        h = self.side / 2.0
        return tuple(c - h for c in self.center)

    def upper(self) -> tuple[float, ...]:
        h = self.side / 2.0
        return tuple(c + h for c in self.center)

    def contains_point(self, point) -> bool:
        h = self.side / 2.0
        return all(c - h <= x <= c + h for c, x in zip(self.center, point))

    @property
    def key(self) -> tuple:
        return (self.center, self.side)

    def to_dict(self) -> dict:
        return {"center": list(self.center), "side": self.side}

    @classmethod
    def from_dict(cls, data: dict) -> "Cube":
        return cls(tuple(data["center"]), data["side"])


def scale(factor: float, q: Cube) -> Cube:
    return q.scaled(factor)


def contains(q: Cube, r: Cube, tol: float = 1e-12) -> bool:
    """Whether q lies inside r, with slack ``tol`` relative to r's side."""
    if q.dimension != r.dimension:
        raise InvalidInputError("cube dimension mismatch")
    slack = tol * r.side
    qh, rh = q.side / 2.0, r.side / 2.0
    for cq, cr in zip(q.center, r.center):
        if cq - qh < cr - rh - slack or cq + qh > cr + rh + slack:
            return False
    return True


def is_doubling(m: GridMeasure, q: Cube, cfg: DoublingConfig) -> bool:
    """Whether the alpha-expansion carries at most beta times the mass.

    Zero-mass convention: an expansion of zero mass is always doubling; a
    zero-mass cube with positive-mass expansion never is.  Both fall out of
    the plain comparison.
    """
    if not q.side >= m.resolution:
        raise InvalidInputError(
            f"cube side {q.side} is below the grid resolution {m.resolution}"
        )
    return measure_of_cube(m, q.scaled(cfg.alpha)) <= cfg.beta * measure_of_cube(m, q)


def smallest_doubling_expansion(
    m: GridMeasure, q: Cube, cfg: DoublingConfig, max_steps: int = DEFAULT_EXPANSION_STEPS
) -> tuple[Cube, int]:
    """First doubling cube alpha^k q with k >= 0 (q itself admissible).

    Terminates within the proof-derived step bound whenever the cube has
    positive mass; see ``expansion_step_bound``.
    """
    if not q.side >= m.resolution:
        raise InvalidInputError(
            f"cube side {q.side} is below the grid resolution {m.resolution}"
        )
    inner = measure_of_cube(m, q)
    for k in range(max_steps + 1):
        cube_k = q.scaled(cfg.alpha**k) if k else q
        outer = measure_of_cube(m, cube_k.scaled(cfg.alpha))
        if outer <= cfg.beta * inner:
            return cube_k, k
        inner = outer
    raise SearchFailureError(
        f"no doubling expansion within {max_steps} steps from side {q.side}",
        cube=q.scaled(cfg.alpha**max_steps),
        exponent=max_steps,
        inner_mass=inner,
    )


def contraction_step_budget(m: GridMeasure, q: Cube, cfg: DoublingConfig) -> int:
    """Largest N with side * alpha^-N still at or above the resolution."""
    return int(math.floor(math.log(q.side / m.resolution) / math.log(cfg.alpha) + 1e-12))


def biggest_doubling_contraction(
    m: GridMeasure, q: Cube, cfg: DoublingConfig, max_steps: int | None = None
) -> tuple[Cube, int]:
    """First doubling cube alpha^-N q with N >= 1 (strict contraction).

    Fails with InadmissibleCenterError when the chain reaches the grid
    resolution floor without a doubling member; callers exclude such cubes
    from families and count them.
    """
    if not q.side >= m.resolution * cfg.alpha:
        raise InvalidInputError(
            f"cube side {q.side} leaves no admissible contraction above the "
            f"resolution {m.resolution}"
        )
    if max_steps is None:
        max_steps = contraction_step_budget(m, q, cfg)
    outer = measure_of_cube(m, q)
    for n in range(1, max_steps + 1):
        cube_n = q.scaled(cfg.alpha**-n)
        if cube_n.side < m.resolution:
            break
        inner = measure_of_cube(m, cube_n)
        if outer <= cfg.beta * inner:
            return cube_n, n
        outer = inner
    raise InadmissibleCenterError(
        f"no doubling contraction above the resolution floor for side {q.side}",
        cube=q,
        exponent=max_steps,
    )


def in_Q(q: Cube) -> bool:
    """Side length at most the unit threshold."""
    return q.side <= UNIT_THRESHOLD


def in_Q_ex(m: GridMeasure, q: Cube, cfg: DoublingConfig) -> bool:
    """Whether the biggest doubling contraction has side at most 1.

    Cubes with side <= 1 qualify outright: their contraction is strictly
    smaller than 1 wherever it lands, so no search (and no resolution-floor
    failure) is needed.  Larger cubes run the search and propagate its
    failure.
    """
    if q.side <= UNIT_THRESHOLD:
        return True
    prime, _ = biggest_doubling_contraction(m, q, cfg)
    return prime.side <= UNIT_THRESHOLD


@dataclass(frozen=True)
class CubeChain:
    """Concentric geometric chain {ratio^j * base : j_lo <= j <= j_hi}."""

    base: Cube
    j_lo: int
    j_hi: int
    ratio: float

    def __post_init__(self):
        if self.j_lo > self.j_hi:
            raise InvalidInputError("chain exponent range is empty")
        if not self.ratio > 1.0:
            raise InvalidInputError("chain ratio must exceed 1")

    def member(self, j: int) -> Cube:
        if not self.j_lo <= j <= self.j_hi:
            raise InvalidInputError(f"exponent {j} outside [{self.j_lo}, {self.j_hi}]")
        return self.base.scaled(self.ratio**j)

    def __iter__(self):
        for j in range(self.j_lo, self.j_hi + 1):
            yield j, self.member(j)


@dataclass(frozen=True)
class ChainSegment:
    """Bracketing doubling cubes of a base cube on its concentric chain.

    ``intermediates`` are the strictly intermediate chain members, all
    certified non-doubling.
    """

    prime: Cube
    prime_exponent: int
    tilde: Cube
    tilde_exponent: int
    intermediates: tuple[Cube, ...]


def chain_segment(m: GridMeasure, q: Cube, cfg: DoublingConfig) -> ChainSegment:
    """Run both searches from q and certify the gap between them.

    Every chain member strictly between the contraction and the expansion
    is non-doubling; this holds by construction of the searches and is
    re-verified here.
    """
    tilde, m_exp = smallest_doubling_expansion(m, q, cfg)
    prime, n_con = biggest_doubling_contraction(m, q, cfg)
    intermediates = []
    for j in range(-n_con + 1, m_exp):
        cube_j = q.scaled(cfg.alpha**j) if j else q
        if is_doubling(m, cube_j, cfg):
            raise SearchFailureError(
                "doubling cube found strictly inside a certified gap",
                cube=cube_j,
                exponent=j,
            )
        intermediates.append(cube_j)
    return ChainSegment(prime, n_con, tilde, m_exp, tuple(intermediates))


def expansion_step_bound(c0_hat: float, side: float, mass: float, cfg: DoublingConfig) -> int:
    """Proof-derived cap on the expansion exponent for a positive-mass cube.

    If the first k members of the chain are all non-doubling the mass grows
    by beta per step while the growth constant caps it at c0 * (alpha^k l)^n,
    so k is at most log_{beta/alpha^n}(c0 l^n / mass).
    """
    if not mass > 0.0:
        raise InvalidInputError("step bound requires positive mass")
    ratio = max(c0_hat * side**cfg.n / mass, 1.0)
    denom = math.log(cfg.beta) - cfg.n * math.log(cfg.alpha)
    return max(0, math.ceil(math.log(ratio) / denom))
