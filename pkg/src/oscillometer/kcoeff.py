"""Scale-gap coefficient for nested cube pairs.

For nested cubes Q inside R the coefficient accumulates the mass-to-scale
ratios of the dyadic expansions of Q up to the first one at least as large
as R.  It is 1 when R is no larger than Q and grows with the mass packed
between the two scales; it penalizes pairs separated by mass-heavy
intermediate scales.  The dyadic factor 2 is part of the definition and is
independent of the chain ratio alpha used by the doubling searches.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInputError, InvalidPairError
from .geometry import Cube, contains
from .measure import DoublingConfig, GridMeasure, measure_of_cube

_MAX_DOUBLINGS = 1100  # float64 side ratios cannot exceed 2**1100


@dataclass(frozen=True)
class KResult:
    """Coefficient value with its step count and per-step terms.

    value = 1 + sum(terms); steps is the first k >= 0 with
    side(2^k Q) >= side(R); terms has one entry per k in 1..steps.
    """

    value: float
    steps: int
    terms: tuple[float, ...]

    def to_dict(self) -> dict:
        return {"value": self.value, "steps": self.steps, "terms": list(self.terms)}


def k_coefficient(
    m: GridMeasure, q: Cube, r: Cube, cfg: DoublingConfig, mass_fn=None
) -> KResult:
    """Scale-gap coefficient of the nested pair (q, r).

    Requires q inside r.  ``mass_fn`` may supply a cached cube-mass lookup;
    it must agree with ``measure_of_cube`` on the measure.
    """
    if not contains(q, r):
        raise InvalidPairError("k_coefficient needs q contained in r")
    if mass_fn is None:
        mass_fn = lambda cube: measure_of_cube(m, cube)

    steps = 0
    while q.side * 2.0**steps < r.side:
        steps += 1
        if steps > _MAX_DOUBLINGS:
            raise InvalidInputError("side ratio too large for a finite coefficient")

    terms = []
    for k in range(1, steps + 1):
        expanded = Cube(q.center, q.side * 2.0**k)
        terms.append(mass_fn(expanded) / expanded.side**cfg.n)
    value = 1.0 + sum(terms)
    return KResult(value=value, steps=steps, terms=tuple(terms))
