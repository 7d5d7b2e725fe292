"""Boundary/coboundary matrices, Laplacians, and cycle-space restrictions.

All matrices are assembled with exact integer entries in the canonical
cochain basis (j-cells sorted lexicographically); floating point enters
only at eigensolve / null-space time.  The face of an oriented cell
obtained by dropping vertex i carries sign (-1)^i, so the matrix of the
boundary operator on coefficient vectors is the classical simplicial
boundary matrix, and the coboundary matrix is its transpose.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .complexes import Cell, SimplicialComplex, sort_with_sign

# Above this many (d-1)-cells, Laplacians stay sparse and extreme
# eigenvalues are computed iteratively instead of via dense eigensolves.
DENSE_LIMIT = 5000

# Singular values below this fraction of the largest one count as zero when
# extracting ranks and null spaces; integer matrices at desk scale sit far
# from this threshold.
RANK_RCOND = 1e-10


class DimensionError(ValueError):
    """Operator requested for a dimension the complex does not have."""


@lru_cache(maxsize=None)
def cochain_basis(X: SimplicialComplex, j: int) -> tuple[Cell, ...]:
    """Canonical basis of the j-forms: j-cells in lexicographic order."""
    return tuple(X.sorted_cells(j))


@lru_cache(maxsize=None)
def basis_index(X: SimplicialComplex, j: int) -> dict[Cell, int]:
    return {c: i for i, c in enumerate(cochain_basis(X, j))}


def form_value(
    X: SimplicialComplex, f: np.ndarray, vertices: Sequence[int]
) -> float:
    """Evaluate a j-form on an arbitrarily ordered cell (skew-symmetric)."""
    cell, sign = sort_with_sign(vertices)
    return sign * f[basis_index(X, len(cell) - 1)[cell]]


@lru_cache(maxsize=None)
def boundary_matrix(X: SimplicialComplex, j: int) -> sp.csr_matrix:
    """Matrix of the boundary operator from j-forms to (j-1)-forms.

    Rows are indexed by the (j-1)-cells, columns by the j-cells; the column
    of a cell has entry (-1)^i on its i-th facet.  Entries are int64.
    """
    if j < 0 or j > X.dimension:
        raise DimensionError(f"boundary dimension {j} outside 0..{X.dimension}")
    rows_ix = basis_index(X, j - 1)
    cols = cochain_basis(X, j)
    data, rows, cols_ = [], [], []
    for col, sigma in enumerate(cols):
        for i in range(len(sigma)):
            face = sigma[:i] + sigma[i + 1 :]
            rows.append(rows_ix[face])
            cols_.append(col)
            data.append((-1) ** i)
    m = sp.csr_matrix(
        (data, (rows, cols_)),
        shape=(len(rows_ix), len(cols)),
        dtype=np.int64,
    )
    return m


def coboundary_matrix(X: SimplicialComplex, j: int) -> sp.csr_matrix:
    """Adjoint of the boundary: the transposed matrix."""
    return boundary_matrix(X, j).T.tocsr()


def _require_positive_dimension(X: SimplicialComplex) -> None:
    if X.dimension < 1:
        raise DimensionError("Laplacians need a complex of dimension >= 1")


@lru_cache(maxsize=None)
def upper_laplacian(X: SimplicialComplex) -> sp.csr_matrix:
    """The upper Laplacian on (d-1)-forms: boundary_d @ coboundary_d."""
    _require_positive_dimension(X)
    B = boundary_matrix(X, X.dimension)
    return (B @ B.T).tocsr()


@lru_cache(maxsize=None)
def lower_laplacian(X: SimplicialComplex) -> sp.csr_matrix:
    """The lower Laplacian on (d-1)-forms: coboundary_{d-1} @ boundary_{d-1}."""
    _require_positive_dimension(X)
    B = boundary_matrix(X, X.dimension - 1)
    return (B.T @ B).tocsr()


def full_laplacian(X: SimplicialComplex) -> sp.csr_matrix:
    return (upper_laplacian(X) + lower_laplacian(X)).tocsr()


def degree_operator(X: SimplicialComplex) -> sp.csr_matrix:
    """Diagonal matrix of (d-1)-cell degrees."""
    _require_positive_dimension(X)
    degrees = [X.degree(c) for c in cochain_basis(X, X.dimension - 1)]
    return sp.diags(
        np.array(degrees, dtype=np.int64), format="csr", dtype=np.int64
    )


def localized_upper_laplacian(
    X: SimplicialComplex, tau: Iterable[int]
) -> sp.csr_matrix:
    """Upper Laplacian localized at a (d-2)-cell tau.

    Supported on the (d-1)-cells containing tau; there it keeps the
    neighbor terms of the upper Laplacian whose shared d-cell contains tau
    and replaces the diagonal by the degree within the link of tau (which
    for a codimension-one face equals the full degree).
    """
    d = X.dimension
    tau_cell = X._require_cell(tau)
    if len(tau_cell) != d - 1:
        raise DimensionError(
            f"localization needs a ({d - 2})-cell, got dimension {len(tau_cell) - 1}"
        )
    basis = cochain_basis(X, d - 1)
    tau_set = set(tau_cell)
    support = np.array(
        [tau_set.issubset(c) for c in basis], dtype=bool
    )
    up = upper_laplacian(X).toarray()
    local = np.zeros_like(up)
    idx = np.flatnonzero(support)
    local[np.ix_(idx, idx)] = up[np.ix_(idx, idx)]
    for i in idx:
        local[i, i] = X.degree(basis[i])
    return sp.csr_matrix(local)


@lru_cache(maxsize=None)
def cycle_space(X: SimplicialComplex) -> np.ndarray:
    """Orthonormal basis of the (d-1)-cycles, the kernel of the boundary.

    Columns span ker(boundary_{d-1}); any orthonormal basis is acceptable
    since every reported quantity is basis-invariant.
    """
    _require_positive_dimension(X)
    B = boundary_matrix(X, X.dimension - 1).toarray().astype(float)
    if B.shape[1] == 0:
        return np.zeros((0, 0))
    return scipy.linalg.null_space(B, rcond=RANK_RCOND)


def restriction_to_cycles(
    X: SimplicialComplex, M: sp.spmatrix | np.ndarray
) -> np.ndarray:
    """Express an operator on (d-1)-forms in an orthonormal cycle basis.

    Only meaningful for operators preserving the cycle space (the upper and
    full Laplacians, and alpha*I - upper Laplacian).
    """
    Q = cycle_space(X)
    m = X.num_cells(X.dimension - 1)
    if M.shape != (m, m):
        raise ValueError(f"operator shape {M.shape} does not match ({m}, {m})")
    dense = M.toarray() if sp.issparse(M) else np.asarray(M)
    return Q.T @ dense.astype(float) @ Q


def matrix_rank(M: sp.spmatrix | np.ndarray) -> int:
    """Rank via SVD with the shared relative singular-value threshold."""
    dense = M.toarray() if sp.issparse(M) else np.asarray(M)
    dense = dense.astype(float)
    if dense.size == 0:
        return 0
    s = scipy.linalg.svdvals(dense)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > RANK_RCOND * s[0]))


def _orth_or_empty(A: np.ndarray) -> np.ndarray:
    if A.size == 0:
        return np.zeros((A.shape[0], 0))
    return scipy.linalg.orth(A, rcond=RANK_RCOND)


def exact_form_basis(X: SimplicialComplex) -> np.ndarray:
    """Orthonormal basis of the exact (d-1)-forms, the coboundary image."""
    _require_positive_dimension(X)
    B = boundary_matrix(X, X.dimension - 1)
    return _orth_or_empty(B.T.toarray().astype(float))


def hodge_subspaces(
    X: SimplicialComplex,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orthonormal bases of the three Hodge summands of the (d-1)-forms.

    Returns (exact, harmonic, boundary) bases: the coboundary image, the
    kernel of the full Laplacian, and the boundary image of the d-forms.
    """
    _require_positive_dimension(X)
    exact = exact_form_basis(X)
    harmonic = scipy.linalg.null_space(
        full_laplacian(X).toarray().astype(float), rcond=RANK_RCOND
    )
    boundary = _orth_or_empty(
        boundary_matrix(X, X.dimension).toarray().astype(float)
    )
    return exact, harmonic, boundary


def hodge_projections(
    X: SimplicialComplex,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orthogonal projection matrices onto the three Hodge summands."""
    return tuple(Q @ Q.T for Q in hodge_subspaces(X))


def _restricted_operator(
    X: SimplicialComplex, M: sp.spmatrix, shift: float
) -> spla.LinearOperator:
    """P_Z M P_Z + shift * P_B as a LinearOperator (P_Z projects on cycles).

    The exact-forms block is low-dimensional (rank of boundary_{d-1}), so
    the projector is applied through a skinny orthonormal factor.
    """
    Q = exact_form_basis(X)

    def project(x: np.ndarray) -> np.ndarray:
        return x - Q @ (Q.T @ x)

    def matvec(x: np.ndarray) -> np.ndarray:
        y = project(M @ project(x))
        if shift:
            y = y + shift * (x - project(x))
        return y

    m = M.shape[0]
    return spla.LinearOperator((m, m), matvec=matvec, dtype=float)


def restricted_extremes(
    X: SimplicialComplex, M: sp.spmatrix | np.ndarray
) -> tuple[float, float]:
    """Smallest and largest eigenvalue of an operator on the cycle space.

    Dense solve below DENSE_LIMIT; above it, iterative extreme eigenvalues
    of the projected operator (the minimum is found as an offset largest
    eigenvalue, which is robust for these positive-semidefinite shapes).
    """
    m = X.num_cells(X.dimension - 1)
    z_dim = m - matrix_rank(boundary_matrix(X, X.dimension - 1))
    if z_dim <= 0:
        raise ValueError("cycle space is trivial")
    if m <= DENSE_LIMIT:
        vals = np.linalg.eigvalsh(restriction_to_cycles(X, M))
        return float(vals[0]), float(vals[-1])
    M = M.tocsr().astype(float)
    # Every eigenvalue lies within the infinity norm, so parking the
    # exact-forms block at -2*scale keeps it below both extremes.
    scale = float(spla.norm(M, np.inf)) + 1.0
    hi_op = _restricted_operator(X, M, shift=-2.0 * scale)
    hi = float(spla.eigsh(hi_op, k=1, which="LA", return_eigenvectors=False)[0])
    lo_op = _restricted_operator(X, -M, shift=-2.0 * scale)
    lo = -float(
        spla.eigsh(lo_op, k=1, which="LA", return_eigenvectors=False)[0]
    )
    return lo, hi
