"""Uniform periodic grids and values sampled on them.

``R^d`` is modelled at desk scale by the box ``prod_i [-L_i, L_i)`` sampled
at ``N_i`` evenly spaced nodes per axis (``N_i`` even).  Nodes are
``x_k = -L + k * dx`` with ``dx = 2L/N``; multi-dimensional nodes are
enumerated row-major with axis 0 slowest.  The matched frequency lattice
(see :func:`dual_grid`) has spacing ``dp = pi/L`` so that
``dx * dp * N = 2*pi`` per axis, which is what makes the transform pair in
:mod:`schwartzcalc.families` an exact mutual inverse at grid level.

All values here are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Sequence

import numpy as np

from .errors import ArityMismatch, GridMismatch, IndexOffGrid, InvalidGrid

__all__ = [
    "Grid",
    "GridDistribution",
    "SymbolFunction",
    "make_grid",
    "dual_grid",
    "quadrature_weight",
    "sample_function",
    "zero_distribution",
    "delta_distribution",
    "pairing",
    "sup_norm",
    "l2_norm",
    "constant_symbol",
    "unit_symbol",
]

# Relative slack (in units of the axis spacing) when matching a requested
# index point to a grid node.
_NODE_TOLERANCE = 1e-8


@dataclasses.dataclass(frozen=True)
class Grid:
    """Truncated uniform lattice standing in for ``R^dim``.

    Parameters
    ----------
    dim : int
        Number of axes.
    counts : tuple of int
        Samples per axis; each must be even and >= 4.
    half_extents : tuple of float
        Box half-widths ``L_i > 0``; axis i covers ``[-L_i, L_i)``.
    """

    dim: int
    counts: tuple[int, ...]
    half_extents: tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise InvalidGrid(f"dimension must be a positive integer, got {self.dim!r}")
        counts = tuple(int(n) for n in self.counts)
        extents = tuple(float(L) for L in self.half_extents)
        if len(counts) != self.dim or len(extents) != self.dim:
            raise InvalidGrid(
                f"need {self.dim} counts and half_extents, got "
                f"{len(counts)} and {len(extents)}"
            )
        for n in counts:
            if n < 4 or n % 2 != 0:
                raise InvalidGrid(f"axis counts must be even and >= 4, got {n}")
        for L in extents:
            if not math.isfinite(L) or L <= 0.0:
                raise InvalidGrid(f"half extents must be positive and finite, got {L}")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "half_extents", extents)

    @property
    def spacings(self) -> tuple[float, ...]:
        """Per-axis node spacing ``dx_i = 2 L_i / N_i``."""
        return tuple(2.0 * L / n for L, n in zip(self.half_extents, self.counts))

    @property
    def size(self) -> int:
        """Total node count ``prod N_i``."""
        return math.prod(self.counts)

    @property
    def cell_volume(self) -> float:
        """Quadrature weight of one node, ``prod dx_i``."""
        return math.prod(self.spacings)

    def axis_points(self, axis: int) -> np.ndarray:
        """Node coordinates along one axis, ``-L + k*dx`` for k = 0..N-1."""
        n = self.counts[axis]
        L = self.half_extents[axis]
        dx = 2.0 * L / n
        return -L + dx * np.arange(n)

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of shape ``counts``, one per axis (ij indexing)."""
        axes = [self.axis_points(i) for i in range(self.dim)]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def points(self) -> np.ndarray:
        """All nodes as a ``(size, dim)`` array in row-major order."""
        return np.stack([m.ravel() for m in self.meshes()], axis=-1)

    def index_of(self, point) -> int:
        """Flat (row-major) position of the node coinciding with ``point``.

        Raises
        ------
        IndexOffGrid
            If ``point`` is farther than a small tolerance from every node.
        """
        p = np.atleast_1d(np.asarray(point, dtype=float))
        if p.shape != (self.dim,):
            raise IndexOffGrid(
                f"index point must have {self.dim} coordinates, got shape {p.shape}"
            )
        multi = []
        for i in range(self.dim):
            L = self.half_extents[i]
            n = self.counts[i]
            dx = 2.0 * L / n
            k = round((p[i] + L) / dx)
            if k < 0 or k >= n or abs(p[i] - (-L + k * dx)) > _NODE_TOLERANCE * dx:
                raise IndexOffGrid(
                    f"point {tuple(p)} is not a node of the grid "
                    f"(axis {i}: nearest node {-L + k * dx:g})"
                )
            multi.append(k)
        return int(np.ravel_multi_index(multi, self.counts))

    def point_at(self, flat: int) -> tuple[float, ...]:
        """Coordinates of the node at flat (row-major) position ``flat``."""
        multi = np.unravel_index(flat, self.counts)
        return tuple(
            float(-L + 2.0 * L / n * k)
            for k, L, n in zip(multi, self.half_extents, self.counts)
        )


def make_grid(dim: int, counts: Sequence[int], half_extents: Sequence[float]) -> Grid:
    """Build a validated grid. See :class:`Grid` for the conventions."""
    return Grid(dim, tuple(counts), tuple(half_extents))


def dual_grid(g: Grid) -> Grid:
    """Frequency lattice matched to ``g``.

    Same counts; node ``j`` along an axis sits at ``j * (pi/L)`` for
    ``j in [-N/2, N/2)``, so the dual half-extent is ``N*pi/(2L)`` and the
    construction is an involution: ``dual_grid(dual_grid(g))`` has the
    spacings of ``g``.
    """
    return Grid(
        g.dim,
        g.counts,
        tuple(n * math.pi / (2.0 * L) for n, L in zip(g.counts, g.half_extents)),
    )


def quadrature_weight(g: Grid) -> float:
    """Weight of one node in the box quadrature, ``prod dx_i``."""
    return g.cell_volume


class GridDistribution:
    """Complex samples on a grid; the desk-scale surrogate of a distribution.

    Samples are stored flat in the grid's row-major order and frozen after
    construction.
    """

    __slots__ = ("grid", "samples")

    def __init__(self, grid: Grid, samples):
        arr = np.asarray(samples, dtype=np.complex128).reshape(-1).copy()
        if arr.size != grid.size:
            raise GridMismatch(
                f"expected {grid.size} samples for the grid, got {arr.size}"
            )
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("distribution samples must all be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "samples", arr)

    def __setattr__(self, name, value):
        raise AttributeError("GridDistribution is immutable")

    def __repr__(self):
        return f"GridDistribution(grid={self.grid!r}, n={self.samples.size})"

    # small arithmetic surface; everything returns a fresh distribution
    def _binary(self, other, op):
        if isinstance(other, GridDistribution):
            if other.grid != self.grid:
                raise GridMismatch("operands live on different grids")
            return GridDistribution(self.grid, op(self.samples, other.samples))
        return GridDistribution(self.grid, op(self.samples, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    def __rmul__(self, other):
        return GridDistribution(self.grid, other * self.samples)

    def __neg__(self):
        return GridDistribution(self.grid, -self.samples)


def sample_function(grid: Grid, fn: Callable) -> GridDistribution:
    """Sample a vectorized function of the grid coordinates.

    ``fn`` receives one coordinate array per axis (shaped ``counts``) and
    must return an array broadcastable to that shape.
    """
    values = np.asarray(fn(*grid.meshes()), dtype=np.complex128)
    values = np.broadcast_to(values, grid.counts)
    return GridDistribution(grid, values.ravel())


def zero_distribution(grid: Grid) -> GridDistribution:
    return GridDistribution(grid, np.zeros(grid.size, dtype=np.complex128))


def delta_distribution(grid: Grid, point) -> GridDistribution:
    """Unit point mass at a grid node: ``1/cell_volume`` there, zero elsewhere.

    Normalized so that ``pairing(delta_p, phi) == phi(p)`` under the box
    quadrature.
    """
    flat = grid.index_of(point)
    samples = np.zeros(grid.size, dtype=np.complex128)
    samples[flat] = 1.0 / grid.cell_volume
    return GridDistribution(grid, samples)


def pairing(u: GridDistribution, phi) -> complex:
    """Quadrature pairing ``<u, phi> = sum_k u(x_k) phi(x_k) * cell_volume``.

    ``phi`` may be a vectorized callable of the coordinates, another
    distribution on the same grid, or a raw sample array.  No conjugation is
    applied (distributional pairing, not an inner product).
    """
    if callable(phi):
        phi_vals = np.broadcast_to(
            np.asarray(phi(*u.grid.meshes()), dtype=np.complex128), u.grid.counts
        ).ravel()
    elif isinstance(phi, GridDistribution):
        if phi.grid != u.grid:
            raise GridMismatch("pairing operands live on different grids")
        phi_vals = phi.samples
    else:
        phi_vals = np.asarray(phi, dtype=np.complex128).reshape(-1)
        if phi_vals.size != u.grid.size:
            raise GridMismatch("pairing array has the wrong length for the grid")
    return complex(np.sum(u.samples * phi_vals) * u.grid.cell_volume)


def sup_norm(u: GridDistribution) -> float:
    return float(np.max(np.abs(u.samples))) if u.samples.size else 0.0


def l2_norm(u: GridDistribution) -> float:
    """Quadrature-weighted L2 norm, ``sqrt(sum |u|^2 * cell_volume)``."""
    return float(np.sqrt(np.sum(np.abs(u.samples) ** 2) * u.grid.cell_volume))


@dataclasses.dataclass(frozen=True)
class SymbolFunction:
    """Deterministic scalar function of ``arity`` real coordinates.

    The evaluator must be vectorized: it receives one numpy coordinate array
    per axis and returns an array broadcastable against them (a plain scalar
    is also accepted).  Symbols carry the eigenvalue systems, multiplication
    weights and division denominators used throughout the package.
    """

    arity: int
    evaluator: Callable
    descriptor: str = "symbol"

    def __post_init__(self):
        if self.arity < 1:
            raise ArityMismatch(f"symbol arity must be >= 1, got {self.arity}")

    def at(self, point) -> complex:
        """Evaluate at a single point (scalar allowed when arity is 1)."""
        p = np.atleast_1d(np.asarray(point, dtype=float))
        if p.shape != (self.arity,):
            raise ArityMismatch(
                f"symbol {self.descriptor!r} has arity {self.arity}, "
                f"got point of shape {p.shape}"
            )
        return complex(self.evaluator(*p))

    def sample(self, grid: Grid) -> np.ndarray:
        """Values on every node of ``grid`` (flat, row-major, complex)."""
        if grid.dim != self.arity:
            raise ArityMismatch(
                f"symbol {self.descriptor!r} has arity {self.arity}, "
                f"grid has dimension {grid.dim}"
            )
        values = np.asarray(self.evaluator(*grid.meshes()), dtype=np.complex128)
        values = np.broadcast_to(values, grid.counts)
        return np.ascontiguousarray(values.ravel())

    def _combine(self, other, op, tag):
        if isinstance(other, SymbolFunction):
            if other.arity != self.arity:
                raise ArityMismatch(
                    f"cannot combine symbols of arity {self.arity} and {other.arity}"
                )
            f, g = self.evaluator, other.evaluator
            return SymbolFunction(
                self.arity,
                lambda *x: op(f(*x), g(*x)),
                f"({self.descriptor} {tag} {other.descriptor})",
            )
        if np.isscalar(other):
            f = self.evaluator
            return SymbolFunction(
                self.arity,
                lambda *x: op(f(*x), other),
                f"({self.descriptor} {tag} {other})",
            )
        return NotImplemented

    def __mul__(self, other):
        return self._combine(other, np.multiply, "*")

    __rmul__ = __mul__

    def __add__(self, other):
        return self._combine(other, np.add, "+")

    __radd__ = __add__


def constant_symbol(arity: int, value: complex, descriptor: str | None = None) -> SymbolFunction:
    value = complex(value)
    return SymbolFunction(
        arity,
        lambda *x: np.full(np.broadcast(*x).shape, value),
        descriptor if descriptor is not None else f"const({value})",
    )


def unit_symbol(arity: int) -> SymbolFunction:
    """The constant function 1 on ``R^arity``."""
    return constant_symbol(arity, 1.0, "one")
