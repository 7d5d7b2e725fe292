"""Geometric overlap: point depth under straight-line placements, placement
search for overlap upper bounds, and the spectral lower-bound formula.

The depth of a point is the number of top cells whose closed convex hull of
vertex images contains it (closed hulls, so boundary points count).  For
lines and the plane the maximum depth is exact: the depth function is
piecewise constant on the arrangement of cell boundaries and its maximum is
attained at a candidate point (a placed vertex or a proper crossing of two
edges), evaluated with exact rational predicates.  In higher dimension the
reported depth is a sampled lower bound, flagged approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .complexes import SimplicialComplex
from .operators import DENSE_LIMIT, restricted_extremes, restriction_to_cycles, upper_laplacian
from .rng import DEFAULT_SEED, derive_rng
from .spectral import average_degree, symmetric_spectrum

RatPoint = tuple[Fraction, Fraction]


class PlacementError(ValueError):
    """Placement does not cover the vertex set or has bad coordinates."""


def check_placement(X: SimplicialComplex, placement: np.ndarray) -> np.ndarray:
    points = np.asarray(placement, dtype=float)
    if points.ndim != 2 or points.shape != (X.n, X.dimension):
        raise PlacementError(
            f"placement must be ({X.n}, {X.dimension}), got {points.shape}"
        )
    if not np.isfinite(points).all():
        raise PlacementError("placement has non-finite coordinates")
    return points


def _orient(a: RatPoint, b: RatPoint, c: RatPoint) -> int:
    det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (det > 0) - (det < 0)


def _on_segment(p: RatPoint, a: RatPoint, b: RatPoint) -> bool:
    if _orient(a, b, p) != 0:
        return False
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _in_closed_triangle(p: RatPoint, tri: Sequence[RatPoint]) -> bool:
    a, b, c = tri
    s = _orient(a, b, c)
    if s == 0:
        # degenerate hull: a segment (or a single point)
        pairs = [(a, b), (a, c), (b, c)]
        def d2(u: RatPoint, v: RatPoint) -> Fraction:
            return (u[0] - v[0]) ** 2 + (u[1] - v[1]) ** 2
        e1, e2 = max(pairs, key=lambda uv: d2(*uv))
        if e1 == e2:
            return p == e1
        return _on_segment(p, e1, e2)
    return (
        s * _orient(a, b, p) >= 0
        and s * _orient(b, c, p) >= 0
        and s * _orient(c, a, p) >= 0
    )


def _proper_crossing(
    p: RatPoint, q: RatPoint, r: RatPoint, s: RatPoint
) -> RatPoint | None:
    """Intersection point of two closed segments crossing in their interiors.

    Touches and collinear overlaps are ignored; those intersection extremes
    are segment endpoints, which are already candidate points.
    """
    d1 = _orient(p, q, r)
    d2 = _orient(p, q, s)
    d3 = _orient(r, s, p)
    d4 = _orient(r, s, q)
    if d1 * d2 < 0 and d3 * d4 < 0:
        qp = (q[0] - p[0], q[1] - p[1])
        sr = (s[0] - r[0], s[1] - r[1])
        rp = (r[0] - p[0], r[1] - p[1])
        denom = qp[0] * sr[1] - qp[1] * sr[0]
        t = (rp[0] * sr[1] - rp[1] * sr[0]) / denom
        return (p[0] + t * qp[0], p[1] + t * qp[1])
    return None


def rational_placement(points: np.ndarray) -> list[RatPoint]:
    """Exact rational copy of a planar placement (floats are dyadic)."""
    return [(Fraction(float(x)), Fraction(float(y))) for x, y in points]


def _as_rational_point(point: Sequence) -> RatPoint:
    x, y = point
    fx = x if isinstance(x, Fraction) else Fraction(float(x))
    fy = y if isinstance(y, Fraction) else Fraction(float(y))
    return (fx, fy)


def depth_at_rational(
    X: SimplicialComplex, rat_points: list[RatPoint], point: Sequence
) -> tuple[int, list[bool]]:
    """Exact depth of a rational point in a rational planar placement."""
    p = _as_rational_point(point)
    cells = X.sorted_cells(2)
    mask = [_in_closed_triangle(p, [rat_points[v] for v in c]) for c in cells]
    return sum(mask), mask


@dataclass(frozen=True)
class DepthResult:
    """Witness point with its depth among the top-cell hulls."""

    point: tuple[float, ...]
    depth: int
    fraction: float
    exact: bool
    mask: tuple[bool, ...]


def _depth_result(
    point: Sequence[float], mask: Sequence[bool], total: int, exact: bool
) -> DepthResult:
    depth = int(sum(mask))
    return DepthResult(
        point=tuple(float(x) for x in point),
        depth=depth,
        fraction=depth / total,
        exact=exact,
        mask=tuple(bool(b) for b in mask),
    )


def depth_at_point(
    X: SimplicialComplex, placement: np.ndarray, point: Sequence[float]
) -> DepthResult:
    """Depth of one point; exact rational containment for d <= 2."""
    points = check_placement(X, placement)
    cells = X.sorted_cells(X.dimension)
    d = X.dimension
    if d == 1:
        x = float(point[0])
        mask = [
            min(points[c[0], 0], points[c[1], 0])
            <= x
            <= max(points[c[0], 0], points[c[1], 0])
            for c in cells
        ]
        return _depth_result((x,), mask, len(cells), exact=True)
    if d == 2:
        rat = rational_placement(points)
        _, mask = depth_at_rational(X, rat, point)
        return _depth_result(
            tuple(float(x) for x in point), mask, len(cells), exact=True
        )
    mask = _simplex_mask_float(points, cells, np.asarray(point, dtype=float))
    return _depth_result(point, mask, len(cells), exact=False)


def _simplex_mask_float(
    points: np.ndarray, cells: list, point: np.ndarray, tol: float = 1e-9
) -> list[bool]:
    """Closed-hull containment via barycentric coordinates (float path)."""
    mask = []
    for c in cells:
        verts = points[list(c)]
        A = (verts[1:] - verts[0]).T
        rhs = point - verts[0]
        lam, residual, rank, _ = np.linalg.lstsq(A, rhs, rcond=None)
        recon = A @ lam
        if np.linalg.norm(recon - rhs) > tol * max(1.0, np.abs(verts).max()):
            mask.append(False)
            continue
        mask.append(bool(lam.min() >= -tol and lam.sum() <= 1 + tol))
    return mask


def _triangle_arrays(points: np.ndarray, cells: list) -> np.ndarray:
    return np.stack([points[list(c)] for c in cells])  # (T, 3, 2)


def _float_triangle_mask(tris: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Vectorized closed point-in-triangle for sampling, (S, T) mask.

    Degenerate triangles are handled by the exact candidate path; here a
    zero-orientation triangle accepts points on its (degenerate) hull only
    up to float tolerance, which is fine for a sampled lower bound.
    """
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]

    def cross(u0, u1, v0, v1):
        return u0 * v1 - u1 * v0

    s = cross(b[:, 0] - a[:, 0], b[:, 1] - a[:, 1], c[:, 0] - a[:, 0], c[:, 1] - a[:, 1])
    o1 = cross(
        (b[:, 0] - a[:, 0])[None, :],
        (b[:, 1] - a[:, 1])[None, :],
        pts[:, 0][:, None] - a[:, 0][None, :],
        pts[:, 1][:, None] - a[:, 1][None, :],
    )
    o2 = cross(
        (c[:, 0] - b[:, 0])[None, :],
        (c[:, 1] - b[:, 1])[None, :],
        pts[:, 0][:, None] - b[:, 0][None, :],
        pts[:, 1][:, None] - b[:, 1][None, :],
    )
    o3 = cross(
        (a[:, 0] - c[:, 0])[None, :],
        (a[:, 1] - c[:, 1])[None, :],
        pts[:, 0][:, None] - c[:, 0][None, :],
        pts[:, 1][:, None] - c[:, 1][None, :],
    )
    sgn = np.sign(s)[None, :]
    # degenerate triangles claim nothing here; the exact path covers them
    return (
        (sgn * o1 >= 0) & (sgn * o2 >= 0) & (sgn * o3 >= 0) & (sgn != 0)
    )


def max_depth(
    X: SimplicialComplex,
    placement: np.ndarray,
    samples: int = 2000,
    seed: int = DEFAULT_SEED,
) -> DepthResult:
    """Maximum depth over all points, for a fixed placement.

    Exact for d = 1 (interval stabbing over endpoint candidates) and d = 2
    (arrangement candidates with exact predicates).  For d >= 3 this is a
    sampled lower bound on the maximum and is flagged as such.
    """
    points = check_placement(X, placement)
    d = X.dimension
    cells = X.sorted_cells(d)
    if not cells:
        raise ValueError("the complex has no top cells")
    if d == 1:
        los = np.minimum(points[[c[0] for c in cells], 0], points[[c[1] for c in cells], 0])
        his = np.maximum(points[[c[0] for c in cells], 0], points[[c[1] for c in cells], 0])
        best = None
        for x in np.unique(points[:, 0]):
            depth = int(((los <= x) & (x <= his)).sum())
            if best is None or depth > best[1]:
                best = (x, depth)
        x, _ = best
        mask = (los <= x) & (x <= his)
        return _depth_result((x,), mask.tolist(), len(cells), exact=True)
    if d == 2:
        return _max_depth_plane(X, points, cells)
    return _max_depth_sampled(X, points, cells, samples, seed)


def _cell_edges(cells: list) -> list[tuple[int, int]]:
    edges = set()
    for c in cells:
        for i, j in combinations(c, 2):
            edges.add((i, j))
    return sorted(edges)


def max_depth_rational(
    X: SimplicialComplex, rat_points: list[RatPoint]
) -> tuple[RatPoint, int, list[bool]]:
    """Exact planar maximum depth, returning the rational witness.

    Candidates are the placed points and the proper crossings of cell
    edges; the depth function is piecewise constant on the arrangement of
    those edges, and with closed hulls its maximum is attained at one of
    the candidates.
    """
    cells = X.sorted_cells(2)
    candidates: list[RatPoint] = list(dict.fromkeys(rat_points))
    edge_list = _cell_edges(cells)
    for (i1, j1), (i2, j2) in combinations(edge_list, 2):
        crossing = _proper_crossing(
            rat_points[i1], rat_points[j1], rat_points[i2], rat_points[j2]
        )
        if crossing is not None:
            candidates.append(crossing)
    tris = [[rat_points[v] for v in c] for c in cells]
    best_point: RatPoint | None = None
    best_mask: list[bool] | None = None
    best_depth = -1
    for p in candidates:
        mask = [_in_closed_triangle(p, t) for t in tris]
        depth = sum(mask)
        if depth > best_depth:
            best_depth = depth
            best_point = p
            best_mask = mask
    assert best_point is not None and best_mask is not None
    return best_point, best_depth, best_mask


def _max_depth_plane(
    X: SimplicialComplex, points: np.ndarray, cells: list
) -> DepthResult:
    witness, _, mask = max_depth_rational(X, rational_placement(points))
    return _depth_result(
        (float(witness[0]), float(witness[1])), mask, len(cells), exact=True
    )


def sample_depth(
    X: SimplicialComplex,
    placement: np.ndarray,
    samples: int = 10000,
    seed: int = DEFAULT_SEED,
) -> DepthResult:
    """Monte Carlo lower bound on the maximum depth (any dimension >= 2).

    The proposal mix concentrates near the arrangement structure (cell
    interiors, chords, and jittered float edge crossings) so that thin
    maximum-depth regions are usually hit; the result is still always a
    lower bound on the true maximum.
    """
    points = check_placement(X, placement)
    cells = X.sorted_cells(X.dimension)
    if X.dimension == 2:
        pts = _sample_points(points, cells, samples, seed)
        pts = np.vstack([pts, _crossing_proposals(points, cells)])
        tris = _triangle_arrays(points, cells)
        inside = _float_triangle_mask(tris, pts)
        depths = inside.sum(axis=1)
        best = int(np.argmax(depths))
        return _depth_result(
            pts[best], inside[best].tolist(), len(cells), exact=False
        )
    return _max_depth_sampled(X, points, cells, samples, seed)


def _crossing_proposals(points: np.ndarray, cells: list) -> np.ndarray:
    """Float edge crossings, nudged toward incident cell centroids.

    A maximum-depth face has a crossing or a placed point on its closure;
    a small step from the crossing toward a containing cell's centroid
    lands inside the face whenever the face opens in that direction.
    """
    edge_list = _cell_edges(cells)
    centroids = np.stack([points[list(c)].mean(axis=0) for c in cells])
    proposals = [points, centroids]
    crossings = []
    for (i1, j1), (i2, j2) in combinations(edge_list, 2):
        p, q = points[i1], points[j1]
        r, s = points[i2], points[j2]
        qp, sr, rp = q - p, s - r, r - p
        denom = qp[0] * sr[1] - qp[1] * sr[0]
        if denom == 0.0:
            continue
        t = (rp[0] * sr[1] - rp[1] * sr[0]) / denom
        u = (rp[0] * qp[1] - rp[1] * qp[0]) / denom
        if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
            crossings.append(p + t * qp)
    if crossings:
        xs = np.stack(crossings)
        proposals.append(xs)
        for step in (1e-7, 1e-4):
            drift = centroids[None, :, :] - xs[:, None, :]
            proposals.append((xs[:, None, :] + step * drift).reshape(-1, 2))
    anchors = np.vstack([points, np.stack(crossings) if crossings else np.empty((0, 2))])
    for step in (1e-7,):
        drift = centroids[None, :, :] - anchors[:, None, :]
        proposals.append((anchors[:, None, :] + step * drift).reshape(-1, 2))
    return np.vstack(proposals)


def _sample_points(
    points: np.ndarray, cells: list, samples: int, seed: int
) -> np.ndarray:
    """Candidate sample mix: convex combinations inside cells, pairwise
    combinations of placed points, and uniform box points."""
    rng = derive_rng(seed, stream=3)
    d = points.shape[1]
    n_cells = max(1, samples // 2)
    n_pairs = max(1, samples // 4)
    n_box = max(1, samples - n_cells - n_pairs)
    out = []
    cell_ix = rng.integers(0, len(cells), size=n_cells)
    width = len(cells[0])
    weights = rng.dirichlet(np.ones(width), size=n_cells)
    cell_pts = np.einsum(
        "sw,swd->sd",
        weights,
        np.stack([points[list(cells[i])] for i in cell_ix]),
    )
    out.append(cell_pts)
    ix = rng.integers(0, points.shape[0], size=(n_pairs, 2))
    t = rng.random(n_pairs)[:, None]
    out.append(points[ix[:, 0]] * t + points[ix[:, 1]] * (1 - t))
    lo, hi = points.min(axis=0), points.max(axis=0)
    out.append(lo + (hi - lo) * rng.random((n_box, d)))
    return np.vstack(out)


def _max_depth_sampled(
    X: SimplicialComplex,
    points: np.ndarray,
    cells: list,
    samples: int,
    seed: int,
) -> DepthResult:
    pts = _sample_points(points, cells, samples, seed)
    pts = np.vstack([pts, points, np.stack([points[list(c)].mean(axis=0) for c in cells])])
    best_mask: list[bool] | None = None
    best_depth = -1
    best_point = pts[0]
    for p in pts:
        mask = _simplex_mask_float(points, cells, p)
        depth = sum(mask)
        if depth > best_depth:
            best_depth = depth
            best_mask = mask
            best_point = p
    assert best_mask is not None
    return _depth_result(best_point, best_mask, len(cells), exact=False)


@dataclass(frozen=True)
class UpperBoundResult:
    """Best (smallest) max-depth fraction found over tried placements."""

    fraction: float
    placement: np.ndarray
    evaluations: int


def overlap_upper_bound(
    X: SimplicialComplex,
    strategy: str = "random",
    seed: int = DEFAULT_SEED,
    iterations: int = 50,
) -> UpperBoundResult:
    """Upper bound on the overlap: min over tried placements of max depth.

    'random' draws independent Gaussian placements; 'adversarial-descent'
    additionally refines the best placement by coordinate perturbations,
    accepting only strict improvements.  Deterministic per seed.
    """
    if strategy not in ("random", "adversarial-descent"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if X.num_cells(X.dimension) == 0:
        raise ValueError("the complex has no top cells")
    rng = derive_rng(seed, stream=4)
    d = X.dimension
    best_frac = math.inf
    best_placement: np.ndarray | None = None
    evaluations = 0
    for _ in range(iterations):
        placement = rng.standard_normal((X.n, d))
        frac = max_depth(X, placement, seed=seed).fraction
        evaluations += 1
        if frac < best_frac:
            best_frac = frac
            best_placement = placement
    assert best_placement is not None
    if strategy == "adversarial-descent":
        step = 1.0
        current = best_placement.copy()
        budget = iterations
        while budget > 0 and step > 1e-3:
            improved = False
            for v in range(X.n):
                for axis in range(d):
                    for delta in (step, -step):
                        if budget <= 0:
                            break
                        trial = current.copy()
                        trial[v, axis] += delta
                        frac = max_depth(X, trial, seed=seed).fraction
                        evaluations += 1
                        budget -= 1
                        if frac < best_frac:
                            best_frac = frac
                            current = trial
                            best_placement = trial
                            improved = True
            if not improved:
                step /= 2.0
    return UpperBoundResult(
        fraction=best_frac, placement=best_placement, evaluations=evaluations
    )


class ConstantError(ValueError):
    """The selection constant must lie in (0, 1]."""


@dataclass(frozen=True)
class OverlapBound:
    """Spectral lower bound on the overlap, in both centerings."""

    c_d: float
    k_avg: float
    lambda_avg: float
    eps: float
    eps_prime: float
    bound_degree: float
    bound_average: float
    value: float
    vacuous: bool


def spectral_overlap_bound(
    X: SimplicialComplex,
    c_d: float,
    eps: float | None = None,
    eps_prime: float | None = None,
) -> OverlapBound:
    """Lower bound on the overlap from the width of the restricted spectrum.

    Two variants: spectrum within eps of the average degree k, and within
    eps' of the spectral average n*k/(n-d); the reported value is the larger
    of the two, flagged vacuous when it is not positive.  The selection
    constant c_d is a caller-supplied parameter.
    """
    if not 0.0 < c_d <= 1.0:
        raise ConstantError(f"selection constant must be in (0,1], got {c_d}")
    if not X.is_complete_skeleton():
        raise ValueError("the spectral overlap bound requires a complete skeleton")
    if X.num_cells(X.dimension) == 0:
        raise ValueError("the complex has no top cells")
    n, d = X.n, X.dimension
    k_avg = average_degree(X)
    lam_avg = n * k_avg / (n - d)
    m = X.num_cells(d - 1)
    if m <= DENSE_LIMIT:
        spec = symmetric_spectrum(restriction_to_cycles(X, upper_laplacian(X)))
        lo, hi = float(spec[0]), float(spec[-1])
    else:
        lo, hi = restricted_extremes(X, upper_laplacian(X))
    if eps is None:
        eps = max(abs(lo - k_avg), abs(hi - k_avg))
    if eps_prime is None:
        eps_prime = max(abs(lo - lam_avg), abs(hi - lam_avg))
    scale = c_d**d / math.e ** (d + 1)
    bound_degree = scale * (c_d - eps * (d + 1) / k_avg)
    bound_average = scale * n / (n - d) * (c_d - eps_prime * (d + 1) / lam_avg)
    value = max(bound_degree, bound_average)
    return OverlapBound(
        c_d=c_d,
        k_avg=k_avg,
        lambda_avg=lam_avg,
        eps=eps,
        eps_prime=eps_prime,
        bound_degree=bound_degree,
        bound_average=bound_average,
        value=value,
        vacuous=value <= 0.0,
    )
