"""Cover parameters and the exact count formulas shared by every module.

All counts are pure functions of (d, eps) so that the number of trees in a
cover is independent of the input points.  The raw formulas produce very
large integers for small eps; they are kept exact (Python ints) and the
cover machinery never enumerates them eagerly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

NONSTEINER = "nonsteiner"
STEINER = "steiner"
MODES = (NONSTEINER, STEINER)

STRATEGIES = ("star", "balanced-score", "dyadic-kary", "dyadic-binary")

# End-to-end scaling constants C (eps_internal = eps / C), per (mode, d).
# Calibrated with the brute-force stretch oracle; see treecover.calibrate.
SCALING_CONSTANTS: dict[tuple[str, int], float] = {
    (NONSTEINER, 1): 12.0,
    (NONSTEINER, 2): 12.0,
    (NONSTEINER, 3): 12.0,
    (STEINER, 1): 12.0,
    (STEINER, 2): 12.0,
    (STEINER, 3): 12.0,
}
DEFAULT_SCALING = 12.0


def scaling_constant(mode: str, d: int) -> float:
    return SCALING_CONSTANTS.get((mode, d), DEFAULT_SCALING)


@dataclass(frozen=True)
class CoverParams:
    """Derived constants of a cover build.

    mu, D, ell and gamma follow the reduction exactly; eps_internal is the
    user eps divided by the shipped scaling constant for (mode, d).
    """

    d: int
    eps: float
    mode: str = NONSTEINER
    strategy: str = "dyadic-binary"
    scaling: float | None = None
    mu_override: float | None = None

    eps_internal: float = field(init=False)
    mu: float = field(init=False)
    D: int = field(init=False)
    gamma: float = field(init=False)
    ell: int = field(init=False)

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if not (0.0 < self.eps < 0.25):
            raise ValueError(
                "eps must be in (0, 0.25); the construction runs internally at "
                "eps divided by the scaling constant, which must lie in (0, 1/20)")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        C = self.scaling if self.scaling is not None else scaling_constant(self.mode, self.d)
        eps_internal = self.eps / C
        if not (0.0 < eps_internal < 0.05):
            raise ValueError("internal eps = eps / C must be in (0, 1/20)")
        object.__setattr__(self, "eps_internal", eps_internal)
        mu = self.mu_override if self.mu_override is not None else 10.0 * self.d * math.sqrt(self.d)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "D", 2 * math.ceil(self.d / 2))
        if self.mode == STEINER:
            gamma = 3.0
        else:
            gamma = 2.0 * math.log2(4.0 * mu * self.d / self.eps_internal)
        gamma = max(gamma, 1.0)
        object.__setattr__(self, "gamma", gamma)
        ell = math.ceil(math.log2(gamma * self.d * math.sqrt(self.d) / self.eps_internal))
        object.__setattr__(self, "ell", max(1, ell))

    @property
    def n_shifts(self) -> int:
        return self.D + 1

    # -- strip family geometry (nonsteiner) --------------------------------

    @property
    def minor_halfwindow(self) -> int:
        """M such that corner-relative minor indices lie in [-M, M]."""
        return math.ceil(2.0 * self.mu)

    @property
    def minor_count(self) -> int:
        return 2 * self.minor_halfwindow + 1

    @property
    def minor_pair_count(self) -> int:
        m = self.minor_count
        return m * (m - 1) // 2

    def n_directions(self) -> int:
        """Size of the direction family used by major strip partitions."""
        if self.d == 1:
            return 1
        if self.d == 2:
            angle = self.eps_internal / (4.0 * self.mu)
            return math.ceil(2.0 * math.pi / angle)
        angle = self.eps_internal / (10.0 * self.mu * self.d * self.d)
        per_axis = math.ceil(2.0 * math.sqrt(self.d) / angle)
        return 2 * self.d * per_axis ** (self.d - 1)

    def n_grid_shifts(self) -> int:
        """Shifted-grid copies of each major partition (2 in the plane)."""
        if self.d == 1:
            return 1
        if self.d == 2:
            return 2
        return 2 * math.ceil((self.d - 1) / 2) + 1

    def n_major_partitions(self) -> int:
        return self.n_directions() * self.n_grid_shifts()

    # -- steiner slab family ------------------------------------------------

    @property
    def slabs_per_axis(self) -> int:
        return math.ceil(3.0 * math.sqrt(self.d) * self.mu)

    @property
    def n_slabs(self) -> int:
        return self.d * self.slabs_per_axis

    @property
    def net_per_axis(self) -> int:
        return max(1, math.floor(2.0 * self.mu / math.sqrt(self.eps_internal)))

    @property
    def net_size(self) -> int:
        return self.net_per_axis ** (self.d - 1)

    # -- cover counts --------------------------------------------------------

    def tau(self) -> int:
        """Number of trees in one partial tree cover."""
        if self.mode == STEINER:
            return self.n_slabs * self.net_size
        return self.n_major_partitions() * self.minor_pair_count

    def tree_count(self) -> int:
        """Exact number of trees in the full cover: (D+1) * ell * tau."""
        return self.n_shifts * self.ell * self.tau()


def pair_index(u: int, v: int, m: int) -> int:
    """Flat index of the pair (u, v), 0 <= u < v < m, in lexicographic order."""
    if not (0 <= u < v < m):
        raise ValueError("pair indices out of range")
    return u * (m - 1) - u * (u - 1) // 2 + (v - u - 1)


def pair_unindex(idx: int, m: int) -> tuple[int, int]:
    """Inverse of pair_index."""
    if not (0 <= idx < m * (m - 1) // 2):
        raise ValueError("pair index out of range")
    u = 0
    row = m - 1
    while idx >= row:
        idx -= row
        u += 1
        row -= 1
    return u, u + 1 + idx
