"""Linear operators diagonal in a family, and measure-style functional calculus.

An operator with eigenfamily ``v`` and eigenvalue system ``a`` acts by the
expansion ``A(u) = superpose(a * coordinates(u, v), v)``: analyse, multiply
by the symbol, synthesize.  On top of that this module builds the
operator-valued maps ``f -> A_f`` ("generalized measures"): the basis
measure ``f -> superpose(f * coordinates(., v), v)``, spectral products with
an arbitrary operator, scalings by a symbol, and the two eigenspectrum
variants whose argument is a function of the eigenvalue values themselves,
always consumed through composition with the eigenvalue system.

Operator equality is never decided symbolically; tests probe agreement on
family members plus random band-limited data (see the verification suites).
"""

from __future__ import annotations

import abc
import dataclasses
from typing import Callable, Sequence

import numpy as np

from .errors import ArityMismatch, GridMismatch, NotABasis
from .grid import (
    Grid,
    GridDistribution,
    SymbolFunction,
    sup_norm,
    unit_symbol,
)
from .families import CoordinateDistribution, SchwartzFamily, coordinates, superpose

__all__ = [
    "SLinearOperator",
    "IdentityOperator",
    "DiagonalOperator",
    "MultiplicationOperator",
    "DenseOperator",
    "CoordinateOperator",
    "SuperposeOperator",
    "SpectrumFunction",
    "spectrum_identity",
    "spectrum_one",
    "GeneralizedMeasure",
    "BasisMeasure",
    "SpectralProductMeasure",
    "ScaledMeasure",
    "EigenspectrumMeasure",
    "OperatorSpectralMeasure",
    "EigenfamilyReport",
    "is_eigenfamily",
    "spectral_apply",
    "spectral_distribution",
    "spectral_product",
    "scale_measure",
    "integrate_measure",
    "eigenspectrum_measure",
    "operator_spectral_measure",
]


def spectral_apply(a: SymbolFunction, v: SchwartzFamily, u: GridDistribution) -> GridDistribution:
    """Apply the operator diagonal in ``v`` with eigenvalue system ``a``.

    Computes ``superpose(a * coordinates(u, v), v)``.  With ``a == 1`` this
    is the resolution of identity and returns ``u`` up to rounding.
    """
    c = coordinates(u, v)
    scaled = GridDistribution(v.index_grid, a.sample(v.index_grid) * c.samples)
    return superpose(scaled, v)


class SLinearOperator(abc.ABC):
    """Linear map between grid distributions."""

    @abc.abstractmethod
    def apply(self, u: GridDistribution) -> GridDistribution: ...

    def __call__(self, u: GridDistribution) -> GridDistribution:
        return self.apply(u)

    def __matmul__(self, other: "SLinearOperator") -> "SLinearOperator":
        return ComposedOperator(self, other)

    def __add__(self, other: "SLinearOperator") -> "SLinearOperator":
        return SumOperator(self, other)

    def __mul__(self, scalar) -> "SLinearOperator":
        return ScaledOperator(complex(scalar), self)

    __rmul__ = __mul__


class IdentityOperator(SLinearOperator):
    def apply(self, u: GridDistribution) -> GridDistribution:
        return u


class ComposedOperator(SLinearOperator):
    def __init__(self, outer: SLinearOperator, inner: SLinearOperator):
        self.outer = outer
        self.inner = inner

    def apply(self, u):
        return self.outer.apply(self.inner.apply(u))


class SumOperator(SLinearOperator):
    def __init__(self, left: SLinearOperator, right: SLinearOperator):
        self.left = left
        self.right = right

    def apply(self, u):
        return self.left.apply(u) + self.right.apply(u)


class ScaledOperator(SLinearOperator):
    def __init__(self, scalar: complex, inner: SLinearOperator):
        self.scalar = scalar
        self.inner = inner

    def apply(self, u):
        return self.scalar * self.inner.apply(u)


class DiagonalOperator(SLinearOperator):
    """Operator with eigenfamily ``family`` and eigenvalue system ``symbol``."""

    def __init__(self, family: SchwartzFamily, symbol: SymbolFunction):
        if symbol.arity != family.index_dim:
            raise ArityMismatch(
                f"symbol arity {symbol.arity} does not match index dimension "
                f"{family.index_dim}"
            )
        self.family = family
        self.symbol = symbol

    def apply(self, u):
        return spectral_apply(self.symbol, self.family, u)

    def __repr__(self):
        return f"DiagonalOperator(symbol={self.symbol.descriptor!r})"


class MultiplicationOperator(SLinearOperator):
    """Pointwise multiplication ``u -> f*u`` by a function of the space coordinates."""

    def __init__(self, symbol: SymbolFunction):
        self.symbol = symbol

    def apply(self, u):
        return GridDistribution(u.grid, self.symbol.sample(u.grid) * u.samples)

    def __repr__(self):
        return f"MultiplicationOperator({self.symbol.descriptor!r})"


class DenseOperator(SLinearOperator):
    """Explicit matrix over a grid's nodes; applied by matrix-vector product."""

    def __init__(self, grid: Grid, matrix):
        arr = np.asarray(matrix, dtype=np.complex128)
        if arr.shape != (grid.size, grid.size):
            raise GridMismatch(
                f"matrix shape {arr.shape} does not match grid size {grid.size}"
            )
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("dense operator entries must all be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        self.grid = grid
        self.matrix = arr

    def apply(self, u):
        if u.grid != self.grid:
            raise GridMismatch("distribution does not live on the operator's grid")
        return GridDistribution(self.grid, self.matrix @ u.samples)


class CoordinateOperator(SLinearOperator):
    """The analysis map ``u -> coordinates(u, v)`` (space grid to index grid)."""

    def __init__(self, family: SchwartzFamily):
        self.family = family

    def apply(self, u):
        return coordinates(u, self.family)


class SuperposeOperator(SLinearOperator):
    """The synthesis map ``c -> superpose(c, v)`` (index grid to space grid)."""

    def __init__(self, family: SchwartzFamily):
        self.family = family

    def apply(self, c):
        return superpose(c, self.family)


@dataclasses.dataclass(frozen=True)
class SpectrumFunction:
    """Function of eigenvalue values ``s`` in the complex plane.

    These are only ever used through composition with an eigenvalue system
    ``a`` (the spectrum set is never materialized): :meth:`compose` returns
    the coordinate-space symbol ``p -> f(a(p))``.  The evaluator must accept
    complex numpy arrays.
    """

    evaluator: Callable
    descriptor: str = "spectrum function"

    def compose(self, a: SymbolFunction) -> SymbolFunction:
        f = self.evaluator
        g = a.evaluator
        return SymbolFunction(
            a.arity,
            lambda *x: f(np.asarray(g(*x), dtype=np.complex128)),
            f"{self.descriptor} o {a.descriptor}",
        )

    def __mul__(self, other):
        if isinstance(other, SpectrumFunction):
            f, g = self.evaluator, other.evaluator
            return SpectrumFunction(
                lambda s: f(s) * g(s), f"({self.descriptor} * {other.descriptor})"
            )
        if np.isscalar(other):
            f = self.evaluator
            return SpectrumFunction(lambda s: f(s) * other, f"({self.descriptor} * {other})")
        return NotImplemented

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, SpectrumFunction):
            f, g = self.evaluator, other.evaluator
            return SpectrumFunction(
                lambda s: f(s) + g(s), f"({self.descriptor} + {other.descriptor})"
            )
        return NotImplemented


def spectrum_identity() -> SpectrumFunction:
    """The embedding ``s -> s`` of the eigenvalue values into the plane."""
    return SpectrumFunction(lambda s: s, "id")


def spectrum_one() -> SpectrumFunction:
    """The constant function 1 on the eigenvalue values."""
    return SpectrumFunction(lambda s: np.ones_like(s), "one")


def _require_basis(v: SchwartzFamily):
    if not v.is_basis:
        raise NotABasis(
            "this construction needs a basis family; use Dirac/Fourier or a "
            "kernel family flagged via as_basis()"
        )


class GeneralizedMeasure(abc.ABC):
    """Linear map from functions to distributions or operators.

    ``evaluate(f)`` is the integral of ``f`` against the measure;
    :meth:`integrate` is the value at the appropriate unit constant.
    """

    @abc.abstractmethod
    def evaluate(self, f): ...

    @abc.abstractmethod
    def _unit(self): ...

    def integrate(self):
        return self.evaluate(self._unit())


class BasisMeasure(GeneralizedMeasure):
    """``f -> operator superpose(f * coordinates(., v), v)`` for a basis ``v``.

    An injective algebra homomorphism from symbols into operators: products
    of symbols go to compositions, and the unit constant goes to the
    identity.
    """

    def __init__(self, family: SchwartzFamily):
        _require_basis(family)
        self.family = family

    def evaluate(self, f: SymbolFunction) -> SLinearOperator:
        return DiagonalOperator(self.family, f)

    def _unit(self):
        return unit_symbol(self.family.index_dim)


class SpectralProductMeasure(GeneralizedMeasure):
    """``f -> operator u -> superpose(f * B(u), v)``.

    ``B`` must map distributions on ``v``'s space grid to distributions on
    ``v``'s index grid (checked when the operator is applied).  With ``B``
    the coordinate operator of ``v`` this reduces to the basis measure.
    """

    def __init__(self, operator: SLinearOperator, family: SchwartzFamily):
        self.operator = operator
        self.family = family

    def evaluate(self, f: SymbolFunction) -> SLinearOperator:
        if f.arity != self.family.index_dim:
            raise ArityMismatch(
                f"symbol arity {f.arity} does not match index dimension "
                f"{self.family.index_dim}"
            )
        B = self.operator
        fam = self.family

        class _ProductOperator(SLinearOperator):
            def apply(self, u):
                mid = B.apply(u)
                if mid.grid != fam.index_grid:
                    raise GridMismatch(
                        "spectral product operator must land on the family's index grid"
                    )
                return superpose(
                    GridDistribution(fam.index_grid, f.sample(fam.index_grid) * mid.samples),
                    fam,
                )

        return _ProductOperator()

    def _unit(self):
        return unit_symbol(self.family.index_dim)


class ScaledMeasure(GeneralizedMeasure):
    """Product ``g . mu`` of a function by a measure: evaluates ``f`` as ``mu(g*f)``."""

    def __init__(self, scaler, inner: GeneralizedMeasure):
        unit = inner._unit()
        if isinstance(unit, SymbolFunction):
            if not isinstance(scaler, SymbolFunction):
                raise ArityMismatch("this measure consumes coordinate symbols")
            if scaler.arity != unit.arity:
                raise ArityMismatch(
                    f"scaler arity {scaler.arity} does not match measure arity {unit.arity}"
                )
        elif isinstance(unit, SpectrumFunction) and not isinstance(scaler, SpectrumFunction):
            raise ArityMismatch("this measure consumes spectrum functions")
        self.scaler = scaler
        self.inner = inner

    def evaluate(self, f):
        return self.inner.evaluate(self.scaler * f)

    def _unit(self):
        return self.inner._unit()


class EigenspectrumMeasure(GeneralizedMeasure):
    """Distribution-valued measure on the eigenvalue values of ``a``.

    ``evaluate(f) = (f o a) * coordinates(u, v)`` on the index grid.  At the
    identity embedding this is ``a * coordinates(u, v)``, the integrand of
    the expansion of the diagonal operator applied to ``u``; at the unit
    constant it is ``coordinates(u, v)`` itself.
    """

    def __init__(self, u: GridDistribution, family: SchwartzFamily, symbol: SymbolFunction):
        if u.grid != family.space_grid:
            raise GridMismatch("distribution does not live on the family's space grid")
        if symbol.arity != family.index_dim:
            raise ArityMismatch(
                f"symbol arity {symbol.arity} does not match index dimension "
                f"{family.index_dim}"
            )
        self.u = u
        self.family = family
        self.symbol = symbol
        self._coords = coordinates(u, family)

    def evaluate(self, f: SpectrumFunction) -> CoordinateDistribution:
        if not isinstance(f, SpectrumFunction):
            raise ArityMismatch("eigenspectrum measures consume spectrum functions")
        composed = f.compose(self.symbol)
        return GridDistribution(
            self.family.index_grid,
            composed.sample(self.family.index_grid) * self._coords.samples,
        )

    def _unit(self):
        return spectrum_one()


class OperatorSpectrumApply(SLinearOperator):
    def __init__(self, family: SchwartzFamily, composed_symbol: SymbolFunction):
        self.family = family
        self.symbol = composed_symbol

    def apply(self, u):
        return spectral_apply(self.symbol, self.family, u)


class OperatorSpectralMeasure(GeneralizedMeasure):
    """Operator-valued measure on the eigenvalue values of ``a``.

    ``evaluate(f)`` is the operator diagonal in ``v`` with symbol ``f o a``.
    At the identity embedding it recovers the operator with eigenvalue
    system ``a``; at the unit constant, the identity operator.
    """

    def __init__(self, symbol: SymbolFunction, family: SchwartzFamily):
        _require_basis(family)
        if symbol.arity != family.index_dim:
            raise ArityMismatch(
                f"symbol arity {symbol.arity} does not match index dimension "
                f"{family.index_dim}"
            )
        self.symbol = symbol
        self.family = family

    def evaluate(self, f: SpectrumFunction) -> SLinearOperator:
        if not isinstance(f, SpectrumFunction):
            raise ArityMismatch("eigenspectrum measures consume spectrum functions")
        return OperatorSpectrumApply(self.family, f.compose(self.symbol))

    def _unit(self):
        return spectrum_one()


@dataclasses.dataclass(frozen=True)
class EigenfamilyReport:
    """Outcome of an eigenfamily residual sweep."""

    max_residual: float
    worst_index: tuple[float, ...]
    tolerance: float
    passed: bool


def is_eigenfamily(
    A: SLinearOperator,
    v: SchwartzFamily,
    a: SymbolFunction,
    tol: float,
    indices: Sequence | None = None,
) -> EigenfamilyReport:
    """Check ``A(v_p) ~= a(p) v_p`` over index nodes.

    The residual at ``p`` is ``sup|A(v_p) - a(p) v_p| / max(1, sup|v_p|)``.
    ``indices`` restricts the sweep to the given index points (useful to
    probe only the resolved band of an approximate operator); the default is
    every node of the index grid.
    """
    if a.arity != v.index_dim:
        raise ArityMismatch(
            f"symbol arity {a.arity} does not match index dimension {v.index_dim}"
        )
    if indices is None:
        pts = [v.index_grid.point_at(k) for k in range(v.index_grid.size)]
    else:
        pts = [tuple(np.atleast_1d(np.asarray(p, dtype=float))) for p in indices]
    worst = -1.0
    worst_point = pts[0]
    for p in pts:
        vp = v.member(p)
        lhs = A.apply(vp)
        resid = sup_norm(lhs - a.at(p) * vp) / max(1.0, sup_norm(vp))
        if resid > worst:
            worst = resid
            worst_point = p
    return EigenfamilyReport(
        max_residual=float(worst),
        worst_index=tuple(float(x) for x in worst_point),
        tolerance=float(tol),
        passed=bool(worst <= tol),
    )


def spectral_distribution(v: SchwartzFamily) -> BasisMeasure:
    """The measure sending a symbol ``f`` to the operator diagonal in ``v``."""
    return BasisMeasure(v)


def spectral_product(B: SLinearOperator, v: SchwartzFamily) -> SpectralProductMeasure:
    """The measure ``f -> superpose(f * B(.), v)``."""
    return SpectralProductMeasure(B, v)


def scale_measure(g, mu: GeneralizedMeasure) -> ScaledMeasure:
    """The measure ``f -> mu(g * f)``."""
    return ScaledMeasure(g, mu)


def integrate_measure(mu: GeneralizedMeasure):
    """Value of the measure at the unit constant function."""
    return mu.integrate()


def eigenspectrum_measure(
    u: GridDistribution, v: SchwartzFamily, a: SymbolFunction
) -> EigenspectrumMeasure:
    """Distribution-valued measure ``f -> (f o a) * coordinates(u, v)``."""
    return EigenspectrumMeasure(u, v, a)


def operator_spectral_measure(
    a: SymbolFunction, v: SchwartzFamily
) -> OperatorSpectralMeasure:
    """Operator-valued measure ``f -> superpose((f o a) * coordinates(., v), v)``."""
    return OperatorSpectralMeasure(a, v)
