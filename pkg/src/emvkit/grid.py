"""Uniform periodic Cartesian grids, cell-centered fields and field files.

Data layout is fixed: `Field.data` has shape (*n, ncomp), row-major with the
component index innermost, which is also the on-disk layout of the binary
field format (magic "EMVF").
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidStateError

__all__ = [
    "Grid",
    "Field",
    "make_field",
    "ghost_fill",
    "restrict",
    "write_field",
    "read_field",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic mesh on a box: per-axis cell counts and [lo, hi)."""

    n: tuple
    lo: tuple
    hi: tuple

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(int(k) for k in self.n))
        object.__setattr__(self, "lo", tuple(float(x) for x in self.lo))
        object.__setattr__(self, "hi", tuple(float(x) for x in self.hi))
        if not (len(self.n) == len(self.lo) == len(self.hi)):
            raise ValueError("n, lo, hi must have equal lengths")
        if len(self.n) not in (1, 2):
            raise ValueError("only 1D and 2D grids are supported")
        if any(k < 1 for k in self.n):
            raise ValueError("cell counts must be positive")
        if any(h <= l for l, h in zip(self.lo, self.hi)):
            raise ValueError("domain must have positive extent")

    @property
    def ndim(self):
        return len(self.n)

    @property
    def dx(self):
        return tuple((h - l) / k for l, h, k in zip(self.lo, self.hi, self.n))

    @property
    def cell_volume(self):
        return float(np.prod(self.dx))

    def axis_centers(self, axis):
        """Cell midpoints along one axis."""
        return self.lo[axis] + (np.arange(self.n[axis]) + 0.5) * self.dx[axis]

    def centers(self):
        """Tuple of midpoint coordinate arrays broadcastable to shape n."""
        axes = [self.axis_centers(d) for d in range(self.ndim)]
        if self.ndim == 1:
            return (axes[0],)
        return tuple(np.meshgrid(*axes, indexing="ij"))


@dataclass
class Field:
    """Cell-centered conserved-variable values on a grid at one time."""

    grid: Grid
    data: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=float)
        expected = self.grid.n + (self.data.shape[-1],)
        if self.data.shape != expected:
            raise ValueError(f"data shape {self.data.shape} != {expected}")

    @property
    def ncomp(self):
        return self.data.shape[-1]

    def copy(self):
        return Field(self.grid, self.data.copy(), self.time)

    def total(self):
        """Discrete integral of each component, sum(u) * cell volume."""
        axes = tuple(range(self.grid.ndim))
        return self.data.sum(axis=axes) * self.grid.cell_volume


def make_field(grid, init, ncomp=None, time=0.0, model=None):
    """Sample `init` at cell midpoints (pointwise, no averaging).

    `init` receives the midpoint coordinate arrays (one per axis, already
    broadcast to the grid shape) and returns conserved values with shape
    (*grid.n, ncomp).
    """
    values = np.asarray(init(*grid.centers()), dtype=float)
    if values.ndim == grid.ndim:  # scalar initial data without component axis
        values = values[..., None]
    if ncomp is not None and values.shape[-1] != ncomp:
        raise ValueError(f"init returned {values.shape[-1]} components, expected {ncomp}")
    if not np.all(np.isfinite(values)):
        raise InvalidStateError("initial data contains non-finite values")
    if model is not None:
        model.validate(values, context="in initial data")
    return Field(grid, values, time)


def ghost_fill(data, width, spatial_ndim=None):
    """Extend an array by periodic ghost layers along its spatial axes.

    `data` is (*n, ncomp); all axes except the last are treated as spatial
    unless `spatial_ndim` says otherwise.  `width` may not exceed the axis
    length (values would wrap more than once).
    """
    data = np.asarray(data)
    nsp = data.ndim - 1 if spatial_ndim is None else spatial_ndim
    width = int(width)
    if width < 0:
        raise ValueError("ghost width must be nonnegative")
    for ax in range(nsp):
        if width > data.shape[ax]:
            raise ValueError(
                f"ghost width {width} exceeds {data.shape[ax]} cells on axis {ax}"
            )
    pad = [(width, width)] * nsp + [(0, 0)] * (data.ndim - nsp)
    return np.pad(data, pad, mode="wrap")


def restrict(fine, factor=2):
    """Coarsen a field by cell-block averaging (conserves the integral)."""
    grid = fine.grid
    factor = int(factor)
    for k in grid.n:
        if k % factor:
            raise ValueError(f"cell count {k} not divisible by {factor}")
    coarse_n = tuple(k // factor for k in grid.n)
    d = fine.data
    if grid.ndim == 1:
        d = d.reshape(coarse_n[0], factor, -1).mean(axis=1)
    else:
        d = d.reshape(coarse_n[0], factor, coarse_n[1], factor, -1).mean(axis=(1, 3))
    cg = Grid(coarse_n, grid.lo, grid.hi)
    return Field(cg, d, fine.time)


# -- binary field file -------------------------------------------------
#
# Layout (little endian):
#   magic   4 bytes  "EMVF"
#   version u32      1
#   ndim    u32
#   n       u32 * ndim
#   ncomp   u32
#   gamma   f64      (0 for scalar models)
#   time    f64
#   data    f64 * (prod(n) * ncomp), row-major, component innermost,
#           axis 0 slowest (axis order x1 then x2)
#
# The domain box is not stored; companion metadata (manifest/config) owns it.

_MAGIC = b"EMVF"
_VERSION = 1


def write_field(path, fld, gamma=0.0, lo=None, hi=None):
    """Write a Field in the binary EMVF format (bit-exact round trip)."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _VERSION))
        fh.write(struct.pack("<I", fld.grid.ndim))
        for k in fld.grid.n:
            fh.write(struct.pack("<I", k))
        fh.write(struct.pack("<I", fld.ncomp))
        fh.write(struct.pack("<d", float(gamma)))
        fh.write(struct.pack("<d", float(fld.time)))
        fh.write(np.ascontiguousarray(fld.data, dtype="<f8").tobytes())


def read_field(path, lo=None, hi=None):
    """Read an EMVF file; returns (Field, gamma).

    The domain box defaults to [0,1) per axis unless lo/hi are supplied.
    """
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"{path}: not an EMVF field file")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        (ndim,) = struct.unpack("<I", fh.read(4))
        n = tuple(struct.unpack("<I", fh.read(4))[0] for _ in range(ndim))
        (ncomp,) = struct.unpack("<I", fh.read(4))
        (gamma,) = struct.unpack("<d", fh.read(8))
        (time,) = struct.unpack("<d", fh.read(8))
        count = int(np.prod(n)) * ncomp
        data = np.frombuffer(fh.read(count * 8), dtype="<f8", count=count)
    lo = tuple([0.0] * ndim) if lo is None else tuple(lo)
    hi = tuple([1.0] * ndim) if hi is None else tuple(hi)
    grid = Grid(n, lo, hi)
    fld = Field(grid, data.reshape(n + (ncomp,)).copy(), time)
    return fld, gamma
