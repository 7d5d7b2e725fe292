"""Eigensolves and spectral quantities of a complex.

The spectral gap is computed by three equivalent routes (direct
restriction, the sorted-spectrum index from the Betti numbers, and for
complete skeletons the minimum of the full Laplacian spectrum); they must
agree to tight tolerance and the reporting path cross-checks them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .complexes import SimplicialComplex
from .operators import (
    DENSE_LIMIT,
    boundary_matrix,
    full_laplacian,
    matrix_rank,
    restricted_extremes,
    restriction_to_cycles,
    upper_laplacian,
)

# Eigenvalues below this absolute threshold count as zero when counting
# multiplicities; desk-scale integer operators keep true nonzero
# eigenvalues orders of magnitude above it.
ZERO_EIGENVALUE_TOL = 1e-6

ROUTE_AGREEMENT_TOL = 1e-8


class SymmetryError(ValueError):
    """Matrix handed to the symmetric eigensolver is not symmetric."""


def symmetric_spectrum(M: sp.spmatrix | np.ndarray) -> np.ndarray:
    """Full eigenvalue list of a symmetric matrix, sorted ascending."""
    dense = M.toarray() if sp.issparse(M) else np.asarray(M)
    dense = dense.astype(float)
    if dense.size:
        scale = max(1.0, float(np.abs(dense).max()))
        if float(np.abs(dense - dense.T).max()) > 1e-12 * scale:
            raise SymmetryError("matrix is not symmetric to 1e-12")
    return np.linalg.eigvalsh(dense)


def betti_numbers(X: SimplicialComplex) -> list[int]:
    """Reduced Betti numbers over the reals, for dimensions -1..d.

    beta_j = |X^j| - rank(boundary_j) - rank(boundary_{j+1}); the boundary
    in dimension 0 maps onto the empty-cell line, which makes the numbers
    reduced (beta_{-1} = 0 for nonempty complexes).
    """
    d = X.dimension
    ranks = {}
    for j in range(0, d + 1):
        ranks[j] = matrix_rank(boundary_matrix(X, j))
    ranks[-1] = 0
    ranks[d + 1] = 0
    return [
        X.num_cells(j) - ranks[j] - ranks[j + 1] for j in range(-1, d + 1)
    ]


def gap_index(X: SimplicialComplex) -> int:
    """Index r such that the gap is the r-th smallest upper eigenvalue."""
    betti = betti_numbers(X)
    d = X.dimension
    return (X.num_cells(d - 1) - betti[d]) - (X.num_cells(d) - betti[d + 1])


@dataclass(frozen=True)
class GapRoutes:
    """The spectral gap by each applicable characterization."""

    restricted_min: float
    lambda_r: float | None
    full_min: float | None
    r: int | None

    def values(self) -> list[float]:
        out = [self.restricted_min]
        if self.lambda_r is not None:
            out.append(self.lambda_r)
        if self.full_min is not None:
            out.append(self.full_min)
        return out

    @property
    def spread(self) -> float:
        vals = self.values()
        return max(vals) - min(vals)


def gap_routes(X: SimplicialComplex) -> GapRoutes:
    """Compute the spectral gap by every route available for this complex.

    Route (a) always applies: the smallest eigenvalue of the upper
    Laplacian on cycles.  Route (b) reads off the r-th sorted eigenvalue of
    the full upper-Laplacian spectrum (dense path only).  Route (c), for
    complete skeletons, is the minimum of the full Laplacian spectrum, at
    which point r must equal C(n-1, d-1).
    """
    m = X.num_cells(X.dimension - 1)
    z_dim = m - matrix_rank(boundary_matrix(X, X.dimension - 1))
    if z_dim == 0:
        raise ValueError(
            "the cycle space is trivial, so the spectral gap is undefined"
        )
    up = upper_laplacian(X)
    complete = X.is_complete_skeleton()
    if m <= DENSE_LIMIT:
        # the index route needs Betti numbers, hence boundary ranks in the
        # top dimension; only affordable on the dense path
        r = gap_index(X)
        restricted = symmetric_spectrum(restriction_to_cycles(X, up))
        restricted_min = float(restricted[0])
        lambda_r = float(symmetric_spectrum(up)[r])
    else:
        r = math.comb(X.n - 1, X.dimension - 1) if complete else None
        restricted_min = restricted_extremes(X, up)[0]
        lambda_r = None
    full_min = None
    if complete:
        expected_r = math.comb(X.n - 1, X.dimension - 1)
        if r != expected_r:
            raise AssertionError(
                f"gap index {r} != C(n-1, d-1) = {expected_r} on a "
                "complete skeleton"
            )
        if m <= DENSE_LIMIT:
            full_min = float(symmetric_spectrum(full_laplacian(X))[0])
        else:
            full_min = restricted_extremes(X, full_laplacian(X))[0]
    return GapRoutes(
        restricted_min=restricted_min, lambda_r=lambda_r, full_min=full_min, r=r
    )


def spectral_gap(X: SimplicialComplex) -> float:
    """The spectral gap: smallest upper-Laplacian eigenvalue on cycles."""
    routes = gap_routes(X)
    if routes.spread > ROUTE_AGREEMENT_TOL:
        raise AssertionError(
            f"spectral gap routes disagree beyond {ROUTE_AGREEMENT_TOL}: "
            f"{routes}"
        )
    return routes.restricted_min


def zero_multiplicity(spectrum: np.ndarray, tol: float = ZERO_EIGENVALUE_TOL) -> int:
    return int(np.sum(np.abs(spectrum) < tol))


@dataclass(frozen=True)
class DensityRecord:
    """The cell-density / average-degree / average-eigenvalue identity."""

    delta: float
    k_avg: float
    lambda_avg: float
    max_abs_residual: float


def density_identity(X: SimplicialComplex) -> DensityRecord:
    """Check delta = lambda_avg / n = k_avg / (n - d) on a complete skeleton."""
    if not X.is_complete_skeleton():
        raise ValueError("density identity requires a complete skeleton")
    n, d = X.n, X.dimension
    m = X.num_cells(d - 1)
    delta = X.num_cells(d) / math.comb(n, d + 1)
    trace = (d + 1) * X.num_cells(d)
    k_avg = trace / m
    z_dim = m - matrix_rank(boundary_matrix(X, d - 1))
    if m <= DENSE_LIMIT:
        restricted = symmetric_spectrum(restriction_to_cycles(X, upper_laplacian(X)))
        lambda_avg = float(restricted.mean()) if restricted.size else 0.0
    else:
        lambda_avg = trace / z_dim
    residual = max(abs(delta - lambda_avg / n), abs(delta - k_avg / (n - d)))
    return DensityRecord(
        delta=delta,
        k_avg=k_avg,
        lambda_avg=lambda_avg,
        max_abs_residual=residual,
    )


def average_degree(X: SimplicialComplex) -> float:
    """Average degree of a (d-1)-cell."""
    m = X.num_cells(X.dimension - 1)
    return (X.dimension + 1) * X.num_cells(X.dimension) / m


def rho_alpha(X: SimplicialComplex, alpha: float) -> float:
    """Spectral norm of (alpha*I - upper Laplacian) on the cycle space."""
    if not X.is_complete_skeleton():
        raise ValueError("the mixing constant assumes a complete skeleton")
    m = X.num_cells(X.dimension - 1)
    if m <= DENSE_LIMIT:
        restricted = symmetric_spectrum(
            restriction_to_cycles(X, upper_laplacian(X))
        )
        return float(np.abs(alpha - restricted).max())
    lo, hi = restricted_extremes(X, upper_laplacian(X))
    return max(abs(alpha - lo), abs(alpha - hi))


@dataclass(frozen=True)
class SpectralReport:
    """Eigendata bundle emitted by the analysis path."""

    n: int
    dimension: int
    cell_counts: list[int]
    spectrum: np.ndarray | None
    restricted_spectrum: np.ndarray | None
    gap: float
    r: int
    betti: list[int]
    lambda_avg: float | None
    delta: float | None
    k_avg: float | None
    density_residual: float | None
    complete_skeleton: bool
    rho: dict[float, float] = field(default_factory=dict)


def spectral_report(
    X: SimplicialComplex, alphas: tuple[float, ...] = ()
) -> SpectralReport:
    """Assemble the full spectral summary for reporting."""
    d = X.dimension
    m = X.num_cells(d - 1)
    routes = gap_routes(X)
    gap = spectral_gap(X)
    complete = X.is_complete_skeleton()
    spectrum = restricted = None
    if m <= DENSE_LIMIT:
        spectrum = symmetric_spectrum(upper_laplacian(X))
        restricted = symmetric_spectrum(
            restriction_to_cycles(X, upper_laplacian(X))
        )
    delta = k_avg = lambda_avg = residual = None
    if complete:
        record = density_identity(X)
        delta, k_avg = record.delta, record.k_avg
        lambda_avg, residual = record.lambda_avg, record.max_abs_residual
    rho = {}
    if complete:
        for alpha in alphas:
            rho[alpha] = rho_alpha(X, alpha)
    return SpectralReport(
        n=X.n,
        dimension=d,
        cell_counts=[X.num_cells(j) for j in range(-1, d + 1)],
        spectrum=spectrum,
        restricted_spectrum=restricted,
        gap=gap,
        r=routes.r,
        betti=betti_numbers(X),
        lambda_avg=lambda_avg,
        delta=delta,
        k_avg=k_avg,
        density_residual=residual,
        complete_skeleton=complete,
        rho=rho,
    )
