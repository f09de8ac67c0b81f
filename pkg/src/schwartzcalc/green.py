"""Green kernel families: members solving ``L G_p = delta_p`` for all indices.

Given an operator diagonal in a family ``lam`` with eigenvalue system ``l``,
and a left inverse family ``mu`` (one whose product with ``lam`` is the
Dirac family), the Green member at ``p`` is the synthesis of ``mu_p / l``.
Two routes are provided: plain reciprocal scaling when ``l`` is bounded away
from zero on the index grid, and thresholded division under a policy when it
is not but every ``mu_p`` stays off the zero set.

Since a point mass cannot be compared node by node after applying ``L``, the
Green property is certified weakly: each member is paired against a fixed
set of Gaussian probe functions and the pairing is compared with point
evaluation of the probe at the member's index.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import NotDivisible, NotInvertible
from .grid import Grid, SymbolFunction
from .families import DiracFamily, KernelFamily, SchwartzFamily
from .solver import DivisionPolicy

__all__ = [
    "GreenFamilyResult",
    "left_inverse_family",
    "green_family",
    "green_family_divided",
    "gaussian_probes",
]

#: number of probe functions used for weak residuals
PROBE_COUNT = 8
#: probe width in units of the axis spacing
PROBE_WIDTH_CELLS = 4.0


def gaussian_probes(grid: Grid) -> tuple[np.ndarray, list]:
    """The documented probe set: 8 Gaussians of width ``4*dx``.

    Centers sit at the midpoints of 8 equal subdivisions of each axis (on
    the box diagonal in several dimensions).  Returns the probe sample
    matrix, shape ``(grid.size, 8)``, and the list of center points.
    """
    meshes = grid.meshes()
    columns = []
    centers = []
    for k in range(PROBE_COUNT):
        center = tuple(
            -L + (k + 0.5) * (2.0 * L / PROBE_COUNT) for L in grid.half_extents
        )
        exponent = 0.0
        for axis in range(grid.dim):
            sigma = PROBE_WIDTH_CELLS * grid.spacings[axis]
            exponent = exponent + ((meshes[axis] - center[axis]) / sigma) ** 2 / 2.0
        columns.append(np.exp(-exponent).ravel())
        centers.append(center)
    return np.stack(columns, axis=1).astype(np.complex128), centers


@dataclasses.dataclass(frozen=True)
class GreenFamilyResult:
    """A Green kernel family with its per-index weak residuals.

    ``weak_residuals[k]`` is the worst probe-pairing error of the member at
    the k-th index node: ``max_phi |<L G_p, phi> - phi(p)|``.
    """

    family: KernelFamily
    weak_residuals: np.ndarray
    probe_centers: tuple
    probe_width_cells: float = PROBE_WIDTH_CELLS

    def max_weak_residual(self) -> float:
        return float(np.max(self.weak_residuals))


def left_inverse_family(lam: SchwartzFamily) -> SchwartzFamily:
    """Family ``mu`` with ``member(mu, p) = coordinates(delta_p, lam)``.

    This is the canonical left inverse: the product ``mu . lam`` resynthesizes
    every point mass, i.e. equals the Dirac family up to rounding.  It is the
    unique choice when ``lam`` has invertible coordinates; for the Dirac
    family it is the Dirac family itself.
    """
    if isinstance(lam, DiracFamily):
        return DiracFamily(lam.space_grid)
    space = lam.space_grid
    deltas = np.eye(space.size, dtype=np.complex128) / space.cell_volume
    rows = lam.coordinates_rows(deltas)
    return KernelFamily(index_grid=space, space_grid=lam.index_grid, kernel=rows)


def _weak_residuals(
    lam: SchwartzFamily, l_values: np.ndarray, green_rows: np.ndarray, index_grid: Grid
) -> tuple[np.ndarray, list]:
    space = lam.space_grid
    probes, centers = gaussian_probes(space)
    # L G_p for every p at once: analyse, scale by l, resynthesize
    coords = lam.coordinates_rows(green_rows)
    image_rows = lam.superpose_rows(coords * l_values[np.newaxis, :])
    pair_matrix = image_rows @ (probes * space.cell_volume)  # (indices, probes)
    # target phi(p) for each index node p and probe
    pts = index_grid.points()
    targets = np.empty((index_grid.size, len(centers)), dtype=np.complex128)
    for j, center in enumerate(centers):
        expo = np.zeros(index_grid.size)
        for axis in range(index_grid.dim):
            sigma = PROBE_WIDTH_CELLS * space.spacings[axis]
            expo += ((pts[:, axis] - center[axis]) / sigma) ** 2 / 2.0
        targets[:, j] = np.exp(-expo)
    residuals = np.max(np.abs(pair_matrix - targets), axis=1)
    return residuals, centers


def green_family(
    lam: SchwartzFamily,
    l: SymbolFunction,
    mu: SchwartzFamily,
    policy: DivisionPolicy | None = None,
) -> GreenFamilyResult:
    """Green family ``G_p = superpose(mu_p / l, lam)`` for invertible ``l``.

    Requires ``|l|`` to stay above the policy's zero threshold on the whole
    index grid (``NotInvertible`` otherwise) and ``mu`` to be a left inverse
    of ``lam`` (weak residuals certify the combination actually used).
    """
    policy = policy or DivisionPolicy()
    l_values = l.sample(lam.index_grid)
    eps = policy.resolve_zero_threshold(l_values)
    magnitudes = np.abs(l_values)
    flat = int(np.argmin(magnitudes))
    if magnitudes[flat] <= eps:
        raise NotInvertible(
            f"symbol magnitude {magnitudes[flat]:.6e} at index node "
            f"{lam.index_grid.point_at(flat)} is below the invertibility "
            f"threshold {eps:.6e}",
            worst_index=flat,
            worst_point=lam.index_grid.point_at(flat),
            magnitude=float(magnitudes[flat]),
        )
    quotient_rows = mu.matrix() * (1.0 / l_values)[np.newaxis, :]
    green_rows = lam.superpose_rows(quotient_rows)
    family = KernelFamily(mu.index_grid, lam.space_grid, green_rows)
    residuals, centers = _weak_residuals(lam, l_values, green_rows, mu.index_grid)
    return GreenFamilyResult(
        family=family, weak_residuals=residuals, probe_centers=tuple(centers)
    )


def green_family_divided(
    lam: SchwartzFamily,
    l: SymbolFunction,
    mu: SchwartzFamily,
    policy: DivisionPolicy | None = None,
) -> GreenFamilyResult:
    """Green family through thresholded division of every ``mu_p`` by ``l``.

    Works when ``l`` has zeros, provided no member of ``mu`` carries
    coefficient mass on the zero set (``NotDivisible`` names the first index
    whose member does).  Zero-set quotient values are set to 0; the result
    equals the product family of the quotients with ``lam``.  When ``l`` has
    no zeros this agrees with :func:`green_family`.
    """
    policy = policy or DivisionPolicy()
    l_values = l.sample(lam.index_grid)
    eps = policy.resolve_zero_threshold(l_values)
    zero_mask = np.abs(l_values) <= eps
    mu_rows = mu.matrix()
    mass = np.abs(mu_rows)
    allowed = policy.residual_threshold * np.max(mass, axis=1, initial=0.0)
    bad = zero_mask[np.newaxis, :] & (mass > allowed[:, np.newaxis])
    bad_rows = np.nonzero(np.any(bad, axis=1))[0]
    if bad_rows.size:
        flat = int(bad_rows[0])
        point = mu.index_grid.point_at(flat)
        raise NotDivisible(
            f"left-inverse member at index node {point} has coefficient mass "
            f"on the symbol's zero set",
            worst_index=flat,
            worst_point=point,
            magnitude=float(np.max(np.where(bad[flat], mass[flat], 0.0))),
        )
    safe = np.where(zero_mask, 1.0, l_values)
    quotient_rows = np.where(zero_mask[np.newaxis, :], 0.0 + 0.0j, mu_rows / safe)
    green_rows = lam.superpose_rows(quotient_rows)
    family = KernelFamily(mu.index_grid, lam.space_grid, green_rows)
    residuals, centers = _weak_residuals(lam, l_values, green_rows, mu.index_grid)
    return GreenFamilyResult(
        family=family, weak_residuals=residuals, probe_centers=tuple(centers)
    )
