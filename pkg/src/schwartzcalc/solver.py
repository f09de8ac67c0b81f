"""Solving ``A(u) = d`` by division in eigen-coordinates.

When ``A`` is diagonal in a basis ``v`` with eigenvalue system ``a``, the
equation reduces on the index grid to ``a * [u|v] = [d|v]``.  A solution
exists exactly when the coefficient distribution of the datum is divisible
by ``a``; the solver performs thresholded pointwise division and
resynthesizes the quotient.  Constant-coefficient differential operators are
handled through the Fourier family of the datum's grid, whose members are
eigenvectors with the polynomial symbol built here.

Division convention: on nodes where ``|a|`` is at or below the zero
threshold, the quotient is set to 0 (the minimal-norm representative among
the many valid quotients); if the datum carries coefficient mass above the
residual tolerance on such a node, ``NotDivisible`` is raised.  On a
periodic box the returned solution is the periodic one.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Mapping

import numpy as np

from .errors import ArityMismatch, GridMismatch, NotDivisible
from .grid import Grid, GridDistribution, SymbolFunction, l2_norm
from .families import (
    CoordinateDistribution,
    FourierFamily,
    SchwartzFamily,
    coordinates,
    superpose,
)
from .spectral import SLinearOperator, spectral_apply

__all__ = [
    "DifferentialOperatorSpec",
    "DifferentialOperator",
    "DivisionPolicy",
    "SolveResult",
    "differential_symbol",
    "divide",
    "solve",
    "solve_pde",
]


def _normalize_multi_index(key) -> tuple[int, ...]:
    if isinstance(key, int):
        key = (key,)
    idx = tuple(int(j) for j in key)
    if any(j < 0 for j in idx):
        raise ArityMismatch(f"derivative multi-index must be non-negative, got {idx}")
    return idx


@dataclasses.dataclass(frozen=True)
class DifferentialOperatorSpec:
    """Constant-coefficient differential operator ``sum_j c_j d^j``.

    ``coeffs`` maps multi-indices (tuples of per-axis derivative orders; a
    bare int means 1-d) to complex coefficients.  All multi-indices must
    share one length, the spatial arity.
    """

    coeffs: Mapping

    def __post_init__(self):
        normalized = {}
        arity = None
        for key, value in dict(self.coeffs).items():
            idx = _normalize_multi_index(key)
            if arity is None:
                arity = len(idx)
            elif len(idx) != arity:
                raise ArityMismatch(
                    f"multi-indices of mixed lengths: {idx} vs arity {arity}"
                )
            normalized[idx] = complex(value)
        object.__setattr__(self, "coeffs", normalized)
        object.__setattr__(self, "_arity", arity)

    @property
    def arity(self) -> int | None:
        """Spatial dimension, or None for the empty (zero) operator."""
        return self._arity

    def order(self) -> int:
        return max((sum(idx) for idx in self.coeffs), default=0)


def differential_symbol(spec: DifferentialOperatorSpec, index_grid: Grid) -> SymbolFunction:
    """Polynomial symbol of the operator on the frequency lattice.

    Acting on the plane wave ``exp(-i p.x)``, the derivative ``d^j`` pulls
    down ``(-i)^|j| p^j``, so the operator's eigenvalue system on the
    Fourier family is ``P(p) = sum_j c_j (-i)^|j| p^j``.  The returned
    symbol is evaluable anywhere; ``index_grid`` fixes (and checks) the
    arity.
    """
    if spec.arity is not None and spec.arity != index_grid.dim:
        raise ArityMismatch(
            f"operator spec has arity {spec.arity}, index grid has dimension "
            f"{index_grid.dim}"
        )
    terms = [(idx, c * (-1j) ** sum(idx)) for idx, c in spec.coeffs.items()]
    dim = index_grid.dim

    def evaluator(*p):
        total = np.zeros(np.broadcast(*p).shape, dtype=np.complex128)
        for idx, factor in terms:
            mono = factor
            for axis in range(dim):
                if idx[axis]:
                    mono = mono * np.asarray(p[axis]) ** idx[axis]
            total = total + mono
        return total

    label = " + ".join(
        f"{c}*d^{idx}" if len(idx) > 1 else f"{c}*d^{idx[0]}"
        for idx, c in spec.coeffs.items()
    )
    return SymbolFunction(dim, evaluator, f"symbol[{label or '0'}]")


class DifferentialOperator(SLinearOperator):
    """Constant-coefficient operator applied spectrally on a periodic box."""

    def __init__(self, spec: DifferentialOperatorSpec):
        self.spec = spec

    def apply(self, u: GridDistribution) -> GridDistribution:
        if self.spec.arity is not None and self.spec.arity != u.grid.dim:
            raise ArityMismatch(
                f"operator arity {self.spec.arity} does not match grid dimension "
                f"{u.grid.dim}"
            )
        fam = FourierFamily(u.grid)
        a = differential_symbol(self.spec, fam.index_grid)
        return spectral_apply(a, fam, u)


@dataclasses.dataclass(frozen=True)
class DivisionPolicy:
    """Thresholds for pointwise division by a symbol.

    ``zero_threshold`` is the absolute magnitude below which the symbol
    counts as zero; ``None`` resolves to ``1e-12 * max|a|`` over the grid at
    division time.  ``residual_threshold`` is the fraction of the datum's
    sup norm tolerated as coefficient mass on the zero set.
    """

    zero_threshold: float | None = None
    residual_threshold: float = 1e-10

    def __post_init__(self):
        zt = self.zero_threshold
        if zt is not None and (math.isnan(zt) or zt <= 0.0):
            raise ValueError(f"zero_threshold must be positive (or None), got {zt}")
        if math.isnan(self.residual_threshold) or self.residual_threshold < 0.0:
            raise ValueError(
                f"residual_threshold must be non-negative, got {self.residual_threshold}"
            )

    def resolve_zero_threshold(self, symbol_values: np.ndarray) -> float:
        if self.zero_threshold is not None:
            return float(self.zero_threshold)
        return 1e-12 * float(np.max(np.abs(symbol_values)))


def divide(
    d_v: CoordinateDistribution,
    a: SymbolFunction,
    policy: DivisionPolicy | None = None,
) -> CoordinateDistribution:
    """Pointwise quotient ``q`` with ``a * q = d_v`` off the zero set of ``a``.

    On nodes with ``|a|`` at or below the zero threshold, ``q`` is set to 0;
    if ``d_v`` exceeds the residual tolerance there, the datum has
    coefficient mass where the symbol vanishes and ``NotDivisible`` is
    raised, carrying the worst offending node.
    """
    policy = policy or DivisionPolicy()
    a_vals = a.sample(d_v.grid)
    eps = policy.resolve_zero_threshold(a_vals)
    zero_mask = np.abs(a_vals) <= eps
    mass = np.abs(d_v.samples)
    allowed = policy.residual_threshold * (float(np.max(mass)) if mass.size else 0.0)
    bad = zero_mask & (mass > allowed)
    if np.any(bad):
        flat = int(np.argmax(np.where(bad, mass, -1.0)))
        raise NotDivisible(
            f"datum has coefficient mass {mass[flat]:.6e} at index node "
            f"{d_v.grid.point_at(flat)} where the symbol magnitude is below "
            f"{eps:.6e}",
            worst_index=flat,
            worst_point=d_v.grid.point_at(flat),
            magnitude=float(mass[flat]),
        )
    q = np.where(zero_mask, 0.0 + 0.0j, d_v.samples / np.where(zero_mask, 1.0, a_vals))
    return GridDistribution(d_v.grid, q)


@dataclasses.dataclass(frozen=True)
class SolveResult:
    """Solution of ``A(u) = d`` together with its quotient and residual."""

    solution: GridDistribution
    quotient: CoordinateDistribution
    #: relative L2 residual of the resynthesized solution against the datum
    residual: float


def solve(
    v: SchwartzFamily,
    a: SymbolFunction,
    d: GridDistribution,
    policy: DivisionPolicy | None = None,
) -> SolveResult:
    """Solve ``A(u) = d`` for the operator diagonal in ``v`` with symbol ``a``.

    ``u = superpose(divide(coordinates(d, v), a), v)``.  Raises
    ``NotDivisible`` when no quotient exists under the policy.  The reported
    residual is ``|A(u) - d| / |d|`` in the quadrature L2 norm.
    """
    if d.grid != v.space_grid:
        raise GridMismatch("datum does not live on the family's space grid")
    d_v = coordinates(d, v)
    q = divide(d_v, a, policy)
    u = superpose(q, v)
    denom = l2_norm(d)
    resid = l2_norm(spectral_apply(a, v, u) - d) / denom if denom > 0.0 else 0.0
    return SolveResult(solution=u, quotient=q, residual=float(resid))


def solve_pde(
    spec: DifferentialOperatorSpec,
    d: GridDistribution,
    policy: DivisionPolicy | None = None,
) -> SolveResult:
    """Solve ``D u = d`` for a constant-coefficient operator on ``d``'s grid.

    Uses the Fourier family of the grid (on which ``D`` is diagonal with the
    polynomial symbol) and symbol division.  The result is the periodic
    solution on the box.
    """
    fam = FourierFamily(d.grid)
    a = differential_symbol(spec, fam.index_grid)
    return solve(fam, a, d, policy)
