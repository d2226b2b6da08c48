"""Staggered rectangular grids with Dirichlet walls.

Cell-centered staggering places points at half-integer offsets so that no
stored point lies on a coordinate or Coulomb singularity (R=0, x=0,
xi=1, |eta|=1). Dirichlet boundary values live outside the stored points
for both policies.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

VALID_AXIS_NAMES = ("R", "x", "y", "xi", "eta")

CELL_CENTERED = "cell_centered"
NODE_CENTERED = "node_centered"
POLICIES = (CELL_CENTERED, NODE_CENTERED)


class GridError(ValueError):
    """Invalid grid construction or out-of-range query."""


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    n: int
    policy: str = CELL_CENTERED

    def __post_init__(self):
        if self.name not in VALID_AXIS_NAMES:
            raise GridError(f"unknown axis name {self.name!r}; use one of {VALID_AXIS_NAMES}")
        if not self.lo < self.hi:
            raise GridError(f"axis {self.name}: need lo < hi, got [{self.lo}, {self.hi}]")
        if self.n < 4:
            raise GridError(f"axis {self.name}: need n >= 4, got {self.n}")
        if self.policy not in POLICIES:
            raise GridError(f"axis {self.name}: unknown policy {self.policy!r}")

    @property
    def spacing(self) -> float:
        if self.policy == CELL_CENTERED:
            return (self.hi - self.lo) / self.n
        return (self.hi - self.lo) / (self.n + 1)

    @property
    def is_symmetric(self) -> bool:
        return self.lo == -self.hi

    def points(self) -> np.ndarray:
        """Stored point coordinates, walls excluded.

        Symmetric axes are built by explicit mirroring so the point set is
        bitwise symmetric under sign flip (the parity machinery relies on
        exact mirror symmetry).
        """
        h = self.spacing
        if self.policy == CELL_CENTERED:
            pts = self.lo + (np.arange(self.n) + 0.5) * h
        else:
            pts = self.lo + np.arange(1, self.n + 1) * h
        if self.is_symmetric and self.n % 2 == 0:
            half = pts[: self.n // 2]
            pts = np.concatenate([half, -half[::-1]])
        return pts

    def midpoints(self) -> np.ndarray:
        """Cell-wall positions for flux-form operators (cell_centered only)."""
        if self.policy != CELL_CENTERED:
            raise GridError("midpoints are defined for cell_centered axes")
        h = self.spacing
        mids = self.lo + np.arange(self.n + 1) * h
        if self.is_symmetric:
            half = mids[: (self.n + 1) // 2]
            mids = np.concatenate([half, [0.0] if self.n % 2 == 0 else [], -half[::-1]])
            mids = np.asarray(mids, dtype=float)
        return mids


@dataclass(frozen=True)
class GridSpec:
    axes: tuple[Axis, ...]

    def __post_init__(self):
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise GridError(f"duplicate axis names in {names}")

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.n for a in self.axes)

    @property
    def total_points(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        return float(np.prod([a.spacing for a in self.axes]))

    def axis_index(self, name: str) -> int:
        for i, a in enumerate(self.axes):
            if a.name == name:
                return i
        raise GridError(f"no axis named {name!r}")

    def axis(self, name: str) -> Axis:
        return self.axes[self.axis_index(name)]

    def points(self, name: str) -> np.ndarray:
        return self.axis(name).points()

    def meshes(self) -> list[np.ndarray]:
        """Full coordinate meshes in row-major (ij) order."""
        return list(np.meshgrid(*[a.points() for a in self.axes], indexing="ij"))

    def linear_index(self, multi: tuple[int, ...]) -> int:
        """Row-major linear index of a multi-index."""
        k = 0
        for size, i in zip(self.shape, multi):
            if not 0 <= i < size:
                raise GridError(f"multi-index {multi} out of range for shape {self.shape}")
            k = k * size + i
        return k

    def multi_index(self, k: int) -> tuple[int, ...]:
        if not 0 <= k < self.total_points:
            raise GridError(f"linear index {k} out of range")
        out = []
        for size in reversed(self.shape):
            out.append(k % size)
            k //= size
        return tuple(reversed(out))

    def grid_hash(self) -> str:
        """Stable digest of the grid definition, recorded in manifests."""
        desc = ";".join(
            f"{a.name}:{a.lo!r}:{a.hi!r}:{a.n}:{a.policy}" for a in self.axes
        )
        return hashlib.sha256(desc.encode()).hexdigest()[:16]


def make_box_grid(axes, policy: str = CELL_CENTERED) -> GridSpec:
    """Build a grid from (name, lo, hi, n) tuples; staggering is cell-centered
    by default."""
    return GridSpec(axes=tuple(Axis(name, lo, hi, n, policy) for name, lo, hi, n in axes))


def nearest_plane_indices(grid: GridSpec, axis: str, value: float):
    """Bracketing point indices along `axis` and linear interpolation weights.

    Returns ((i_lo, i_hi), (w_lo, w_hi)) with w_lo + w_hi = 1. An exact hit
    returns that index twice with weights (1, 0). The value must lie within
    the span of the stored points.
    """
    pts = grid.points(axis)
    if value < pts[0] or value > pts[-1]:
        raise GridError(
            f"value {value} outside stored points [{pts[0]}, {pts[-1]}] of axis {axis!r}"
        )
    i_hi = int(np.searchsorted(pts, value))
    if i_hi < len(pts) and pts[i_hi] == value:
        return (i_hi, i_hi), (1.0, 0.0)
    i_lo = i_hi - 1
    h = pts[i_hi] - pts[i_lo]
    w_hi = (value - pts[i_lo]) / h
    return (i_lo, i_hi), (1.0 - w_hi, w_hi)
