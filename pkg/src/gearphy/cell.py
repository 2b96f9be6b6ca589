"""Cell-level evaluation over annular distance rings.

Users are uniformly distributed over the cell area, so ring population
grows linearly with distance and the front end is designed at the median
(area-wise) distance.  Ring centers sit at annulus midpoints; when the
ring width does not divide the span evenly the last ring is truncated,
and each ring is weighted by its actual annular area so the weights sum
to the cell area exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidParameterError


@dataclass(frozen=True)
class Ring:
    distance: float   # midpoint [m]
    width: float      # radial width [m]

    @property
    def area(self) -> float:
        return 2.0 * math.pi * self.distance * self.width


@dataclass(frozen=True)
class CellScenario:
    d_min: float
    d_max: float
    delta_d: float

    def __post_init__(self):
        if not 0.0 < self.d_min < self.d_max:
            raise InvalidParameterError("need 0 < d_min < d_max")
        if self.delta_d <= 0.0:
            raise InvalidParameterError("ring width must be positive")

    @property
    def cell_area(self) -> float:
        return math.pi * (self.d_max ** 2 - self.d_min ** 2)

    def rings(self) -> list[Ring]:
        rings = []
        start = self.d_min
        while start < self.d_max - 1e-9:
            end = min(start + self.delta_d, self.d_max)
            rings.append(Ring(distance=0.5 * (start + end), width=end - start))
            start = end
        return rings


def median_distance(scn: CellScenario) -> float:
    """Distance splitting the uniformly populated cell area in half."""
    return math.sqrt((scn.d_min ** 2 + scn.d_max ** 2) / 2.0)


def area_weighted_ebit(e_bit_per_ring: list[float], scn: CellScenario) -> float:
    """Area-weighted mean energy per bit; any infeasible ring poisons the total."""
    rings = scn.rings()
    if len(e_bit_per_ring) != len(rings):
        raise InvalidParameterError(
            f"expected {len(rings)} ring values, got {len(e_bit_per_ring)}"
        )
    total = 0.0
    for e, ring in zip(e_bit_per_ring, rings):
        if not math.isfinite(e):
            return math.inf
        total += e * ring.area
    return total / scn.cell_area
