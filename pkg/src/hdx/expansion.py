"""Combinatorial expansion: transversal-cell counting, Cheeger constants,
the explicit cycle test form, mixing-bound audits, link bounds, and the
sphere-normalized constant for incomplete skeletons.

Partition enumeration is over unordered partitions (restricted-growth
strings); counts and block products are exact integers, so minima are
compared exactly and the reported constants are exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .complexes import SimplicialComplex
from .operators import cochain_basis
from .rng import DEFAULT_SEED, derive_rng
from .spectral import average_degree, rho_alpha

Blocks = tuple[tuple[int, ...], ...]

PARTITION_BUDGET = 10**8
TUPLE_BUDGET = 20_000_000
SLACK_TOL = 1e-9
_CHUNK = 1 << 14


class PartitionError(ValueError):
    """Vertex sets that are not disjoint, empty, or not a partition."""


class BudgetError(RuntimeError):
    """Exhaustive enumeration would exceed the configured budget."""


def stirling2(n: int, k: int) -> int:
    """Number of partitions of an n-set into exactly k nonempty blocks."""
    if k <= 0 or k > n:
        return 0
    total = sum(
        (-1) ** i * math.comb(k, i) * (k - i) ** n for i in range(k + 1)
    )
    return total // math.factorial(k)


def as_blocks(
    X: SimplicialComplex,
    sets: Sequence[Iterable[int]],
    partition: bool = False,
) -> Blocks:
    """Validate disjoint nonempty vertex sets; optionally require a partition."""
    blocks = tuple(tuple(sorted(set(int(v) for v in s))) for s in sets)
    seen: set[int] = set()
    for b in blocks:
        if not b:
            raise PartitionError("blocks must be nonempty")
        if b[0] < 0 or b[-1] >= X.n:
            raise PartitionError(f"block {b} has a vertex outside 0..{X.n - 1}")
        if seen.intersection(b):
            raise PartitionError("blocks overlap")
        seen.update(b)
    if partition and len(seen) != X.n:
        raise PartitionError("blocks do not cover the vertex set")
    return blocks


def _labels(n: int, blocks: Blocks) -> np.ndarray:
    labels = np.full(n, -1, dtype=np.int64)
    for i, b in enumerate(blocks):
        labels[list(b)] = i
    return labels


def _transversal_mask(cells: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Which cells are transversal: all labels distinct and none outside.

    ``labels`` has shape (..., n) (a batch of labelings is allowed) and
    ``cells`` has shape (m, width); the mask has shape (..., m).
    """
    L = labels[..., cells]
    ok = (L >= 0).all(axis=-1)
    width = cells.shape[-1]
    for i, j in combinations(range(width), 2):
        ok &= L[..., i] != L[..., j]
    return ok


def count_F(X: SimplicialComplex, sets: Sequence[Iterable[int]]) -> int:
    """Number of top cells with exactly one vertex in each given set."""
    blocks = as_blocks(X, sets)
    if len(blocks) != X.dimension + 1:
        raise PartitionError(
            f"need {X.dimension + 1} sets for a {X.dimension}-complex"
        )
    cells = X.cells_array(X.dimension)
    if cells.shape[0] == 0:
        return 0
    return int(_transversal_mask(cells, _labels(X.n, blocks)).sum())


def _iter_partitions(n: int, k: int) -> Iterator[list[int]]:
    """Restricted-growth strings with exactly k blocks."""
    assignment = [0] * n

    def rec(i: int, used: int) -> Iterator[list[int]]:
        if k - used > n - i:
            return
        if i == n:
            if used == k:
                yield assignment
            return
        for b in range(min(used + 1, k)):
            assignment[i] = b
            yield from rec(i + 1, max(used, b + 1))

    yield from rec(0, 0)


@lru_cache(maxsize=8)
def _all_partitions(n: int, k: int) -> np.ndarray:
    """All k-block partitions as one cached (S(n,k), n) array."""
    rows = [row.copy() for row in _iter_partitions(n, k)]
    return np.array(rows, dtype=np.int8).reshape(len(rows), n)


def _partition_chunks(n: int, k: int, chunk: int = _CHUNK) -> Iterator[np.ndarray]:
    """Chunks of k-block partition assignments, (B, n).

    Small enumerations are cached whole (they are re-scanned by several
    routines); large ones stream to keep memory flat.
    """
    if stirling2(n, k) <= 1 << 20:
        table = _all_partitions(n, k)
        for start in range(0, table.shape[0], chunk):
            yield table[start : start + chunk]
        return
    buffer: list[list[int]] = []
    for row in _iter_partitions(n, k):
        buffer.append(row.copy())
        if len(buffer) >= chunk:
            yield np.array(buffer, dtype=np.int8)
            buffer = []
    if buffer:
        yield np.array(buffer, dtype=np.int8)


def _blocks_from_assignment(assignment: np.ndarray, k: int) -> Blocks:
    return tuple(
        tuple(int(v) for v in np.flatnonzero(assignment == b)) for b in range(k)
    )


@dataclass(frozen=True)
class ExpansionReport:
    """Result of a Cheeger-constant computation."""

    value: float | None
    exact: Fraction | None
    argmin: Blocks | None
    method: str
    evaluated: int


def cheeger_exact(
    X: SimplicialComplex, budget: int = PARTITION_BUDGET
) -> ExpansionReport:
    """True minimum of n*|F| / prod(|A_i|) over unordered partitions.

    Counts and block products are exact integers, so the minimum and the
    reported constant are exact.  A partition with no transversal cell
    certifies the constant is zero and short-circuits the search.
    """
    n, d = X.n, X.dimension
    k = d + 1
    if n < k:
        raise PartitionError(f"need at least {k} vertices, got {n}")
    total = stirling2(n, k)
    if total > budget:
        raise BudgetError(
            f"{total} partitions exceed the budget of {budget}; "
            "use the local search instead"
        )
    cells = X.cells_array(d)
    best_num: int | None = None
    best_den = 1
    best_assignment: np.ndarray | None = None
    evaluated = 0
    for chunk in _partition_chunks(n, k):
        evaluated += chunk.shape[0]
        if cells.shape[0]:
            counts = _transversal_mask(cells, chunk).sum(axis=-1)
        else:
            counts = np.zeros(chunk.shape[0], dtype=np.int64)
        sizes = np.stack(
            [(chunk == b).sum(axis=1) for b in range(k)], axis=1
        ).astype(np.int64)
        prods = sizes.prod(axis=1)
        nums = n * counts.astype(np.int64)
        if best_num is None:
            best_num = int(nums[0])
            best_den = int(prods[0])
            best_assignment = chunk[0].copy()
        better = nums * best_den < best_num * prods
        for i in np.flatnonzero(better):
            if int(nums[i]) * best_den < best_num * int(prods[i]):
                best_num, best_den = int(nums[i]), int(prods[i])
                best_assignment = chunk[i].copy()
        if best_num == 0:
            break
    assert best_assignment is not None
    exact = Fraction(best_num, best_den)
    return ExpansionReport(
        value=float(exact),
        exact=exact,
        argmin=_blocks_from_assignment(best_assignment, k),
        method="exact",
        evaluated=evaluated,
    )


def _ratio(X: SimplicialComplex, cells: np.ndarray, labels: np.ndarray, k: int) -> Fraction:
    count = int(_transversal_mask(cells, labels).sum()) if cells.shape[0] else 0
    prod = 1
    for b in range(k):
        prod *= int((labels == b).sum())
    return Fraction(X.n * count, prod)


def cheeger_local_search(
    X: SimplicialComplex,
    seed: int = DEFAULT_SEED,
    restarts: int = 20,
) -> ExpansionReport:
    """Upper bound on the Cheeger constant by single-vertex-move descent.

    First-improvement hill descent from seeded random partitions; moves that
    would empty a block are forbidden.  The result is always an upper bound
    on the true constant and is deterministic for a fixed seed.
    """
    n, d = X.n, X.dimension
    k = d + 1
    if n < k:
        raise PartitionError(f"need at least {k} vertices, got {n}")
    cells = X.cells_array(d)
    rng = derive_rng(seed, stream=1)
    best: Fraction | None = None
    best_labels: np.ndarray | None = None
    evaluated = 0
    for _ in range(restarts):
        labels = rng.integers(0, k, size=n)
        anchors = rng.permutation(n)[:k]
        labels[anchors] = np.arange(k)
        current = _ratio(X, cells, labels, k)
        evaluated += 1
        improved = True
        while improved and current > 0:
            improved = False
            for v in range(n):
                source = labels[v]
                if (labels == source).sum() == 1:
                    continue
                for b in range(k):
                    if b == source:
                        continue
                    labels[v] = b
                    candidate = _ratio(X, cells, labels, k)
                    evaluated += 1
                    if candidate < current:
                        current = candidate
                        improved = True
                        break
                    labels[v] = source
                if improved:
                    break
        if best is None or current < best:
            best = current
            best_labels = labels.copy()
        if best == 0:
            break
    assert best is not None and best_labels is not None
    return ExpansionReport(
        value=float(best),
        exact=best,
        argmin=_blocks_from_assignment(best_labels, k),
        method="local-search",
        evaluated=evaluated,
    )


def isolated_cell_witness(X: SimplicialComplex, cell: Iterable[int]) -> Blocks:
    """Partition certifying h = 0 from a degree-zero (d-1)-cell.

    Its vertices go to distinct singleton blocks; a transversal top cell
    would have to contain the cell, contradicting degree zero.
    """
    c = tuple(sorted(cell))
    if X.degree(c) != 0:
        raise ValueError(f"{c} has positive degree")
    rest = tuple(v for v in range(X.n) if v not in set(c))
    if not rest:
        raise PartitionError("no vertices left for the final block")
    return tuple((v,) for v in c) + (rest,)


def cheeger_test_form(
    X: SimplicialComplex, partition: Sequence[Iterable[int]]
) -> np.ndarray:
    """The integer cycle form whose Rayleigh quotient is the partition ratio.

    On a cell with one vertex in each of d distinct blocks, the value is the
    size of the missing block, signed by the block permutation; elsewhere
    zero.  Exact guarantees (all integer identities): it is a cycle, its
    squared norm is n * prod(|A_i|), and the coboundary has absolute value
    n exactly on the transversal top cells and 0 elsewhere.
    """
    if not X.is_complete_skeleton():
        raise ValueError("the test form requires a complete skeleton")
    blocks = as_blocks(X, partition, partition=True)
    d = X.dimension
    if len(blocks) != d + 1:
        raise PartitionError(f"need {d + 1} blocks, got {len(blocks)}")
    labels = _labels(X.n, blocks)
    sizes = [len(b) for b in blocks]
    basis = cochain_basis(X, d - 1)
    coeffs = np.zeros(len(basis), dtype=np.int64)
    for idx, sigma in enumerate(basis):
        used = [int(labels[v]) for v in sigma]
        if len(set(used)) != len(used):
            continue
        missing = (set(range(d + 1)) - set(used)).pop()
        perm = used + [missing]
        sign = _permutation_sign(perm)
        coeffs[idx] = sign * sizes[missing]
    return coeffs


def _permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class MixingRecord:
    """One audited tuple of disjoint vertex sets."""

    sizes: tuple[int, ...]
    count: int
    expected: float
    deviation: float
    bound_geometric: float
    bound_ordered: float
    bound_refined: float

    @property
    def slack(self) -> float:
        return (
            min(self.bound_geometric, self.bound_ordered, self.bound_refined)
            - self.deviation
        )


@dataclass(frozen=True)
class MixingAlphaResult:
    """Audit summary for one choice of the centering constant."""

    alpha: float
    rho: float
    audited: int
    violations: int
    min_slack: float
    min_slack_per_bound: tuple[float, float, float]
    records: list[MixingRecord] = field(default_factory=list)


@dataclass(frozen=True)
class MixingAudit:
    exhaustive: bool
    audited: int
    results: list[MixingAlphaResult]


def resolve_alpha(X: SimplicialComplex, alpha: float | str | None) -> float:
    """Map an alpha request (number, 'k', or 'auto') to its value."""
    k_avg = average_degree(X)
    if alpha is None or alpha == "auto":
        return X.n * k_avg / (X.n - X.dimension)
    if alpha == "k":
        return k_avg
    return float(alpha)


def _bounds(
    sizes: np.ndarray, rho: float, n: int, d: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three deviation bounds for tuples of block sizes, vectorized."""
    prod = sizes.prod(axis=1).astype(float)
    geometric = rho * prod ** (d / (d + 1))
    middle = np.ones_like(prod)
    for i in range(1, d):
        middle *= sizes[:, i]
    ordered = rho * np.sqrt(sizes[:, 0] * sizes[:, d]) * middle
    head = np.clip(1.0 - sizes[:, :d].sum(axis=1) / n, 0.0, None)
    tail = np.clip(1.0 - sizes[:, 1:].sum(axis=1) / n, 0.0, None)
    refined = (
        rho * np.sqrt(sizes[:, 0] * head * sizes[:, d] * tail) * middle
    )
    return geometric, ordered, refined


def mixing_audit(
    X: SimplicialComplex,
    alphas: Sequence[float | str] | float | str | None = None,
    exhaustive: bool | None = None,
    seed: int = DEFAULT_SEED,
    samples: int = 2000,
    tuple_budget: int = TUPLE_BUDGET,
    record_limit: int = 5000,
) -> MixingAudit:
    """Audit the mixing bounds over ordered tuples of disjoint vertex sets.

    Every tuple is checked against the geometric-mean bound, the
    ordered-pair bound, and its refined variant with the leave-out factors;
    ordered enumeration covers each unordered family in all orientations of
    the two asymmetric bounds.  Exhaustive below the tuple budget,
    seeded sampling above.
    """
    if not X.is_complete_skeleton():
        raise ValueError("the mixing audit requires a complete skeleton")
    n, d = X.n, X.dimension
    k = d + 1
    if isinstance(alphas, (int, float, str)) or alphas is None:
        alphas = [alphas]
    alpha_values = [resolve_alpha(X, a) for a in alphas]
    rho_values = [rho_alpha(X, a) for a in alpha_values]
    total = (k + 1) ** n
    if exhaustive is None:
        exhaustive = total <= tuple_budget
    cells = X.cells_array(d)

    def labeled_chunks() -> Iterator[np.ndarray]:
        if exhaustive:
            powers = (k + 1) ** np.arange(n, dtype=np.int64)
            for start in range(0, total, _CHUNK):
                codes = np.arange(start, min(start + _CHUNK, total))
                yield (codes[:, None] // powers[None, :]) % (k + 1)
        else:
            rng = derive_rng(seed, stream=2)
            produced = 0
            while produced < samples:
                chunk = rng.integers(0, k + 1, size=(_CHUNK, n))
                keep = np.ones(chunk.shape[0], dtype=bool)
                for b in range(k):
                    keep &= (chunk == b).any(axis=1)
                chunk = chunk[keep][: samples - produced]
                produced += chunk.shape[0]
                if chunk.shape[0]:
                    yield chunk

    audited = 0
    stats = [
        {
            "violations": 0,
            "min_slack": math.inf,
            "per_bound": [math.inf, math.inf, math.inf],
            "records": [],
        }
        for _ in alpha_values
    ]
    keep_records = (total if exhaustive else samples) <= record_limit

    for raw in labeled_chunks():
        labels = raw.astype(np.int8)
        valid = np.ones(labels.shape[0], dtype=bool)
        for b in range(k):
            valid &= (labels == b).any(axis=1)
        labels = labels[valid]
        if labels.shape[0] == 0:
            continue
        # label k means "outside every set"
        labels[labels == k] = -1
        if cells.shape[0]:
            counts = _transversal_mask(cells, labels).sum(axis=-1)
        else:
            counts = np.zeros(labels.shape[0], dtype=np.int64)
        sizes = np.stack(
            [(labels == b).sum(axis=1) for b in range(k)], axis=1
        ).astype(np.int64)
        prod = sizes.prod(axis=1)
        audited += labels.shape[0]
        for ai, (alpha, rho) in enumerate(zip(alpha_values, rho_values)):
            expected = alpha * prod / n
            deviation = np.abs(counts - expected)
            geometric, ordered, refined = _bounds(sizes, rho, n, d)
            slack = np.minimum(np.minimum(geometric, ordered), refined) - deviation
            st = stats[ai]
            st["violations"] += int((slack < -SLACK_TOL).sum())
            if slack.size:
                st["min_slack"] = min(st["min_slack"], float(slack.min()))
                for bi, bound in enumerate((geometric, ordered, refined)):
                    st["per_bound"][bi] = min(
                        st["per_bound"][bi], float((bound - deviation).min())
                    )
            if keep_records:
                for row in range(labels.shape[0]):
                    st["records"].append(
                        MixingRecord(
                            sizes=tuple(int(s) for s in sizes[row]),
                            count=int(counts[row]),
                            expected=float(expected[row]),
                            deviation=float(deviation[row]),
                            bound_geometric=float(geometric[row]),
                            bound_ordered=float(ordered[row]),
                            bound_refined=float(refined[row]),
                        )
                    )

    results = [
        MixingAlphaResult(
            alpha=alpha,
            rho=rho,
            audited=audited,
            violations=st["violations"],
            min_slack=st["min_slack"],
            min_slack_per_bound=tuple(st["per_bound"]),
            records=st["records"],
        )
        for alpha, rho, st in zip(alpha_values, rho_values, stats)
    ]
    return MixingAudit(exhaustive=exhaustive, audited=audited, results=results)


class DegenerateLinkError(ValueError):
    """Link too small to carry a graph Cheeger constant."""


@dataclass(frozen=True)
class LinkBound:
    h_link: float
    bound: float
    h_exact: float | None


def link_cheeger_bound(
    X: SimplicialComplex,
    tau: Iterable[int],
    compute_h: bool = False,
    budget: int = PARTITION_BUDGET,
) -> LinkBound:
    """Upper bound on the Cheeger constant through the link of a codim-2 cell."""
    d = X.dimension
    if d < 2:
        raise DegenerateLinkError("link bounds need dimension >= 2")
    tau_cell = tuple(sorted(tau))
    if len(tau_cell) != d - 1 or tau_cell not in X:
        raise PartitionError(f"{tau_cell} is not a ({d - 2})-cell of the complex")
    link = X.link(tau_cell)
    if link.complex.n < 2:
        raise DegenerateLinkError("link has fewer than two vertices")
    h_link = cheeger_exact(link.complex, budget=budget)
    bound = float(h_link.exact) / (1.0 - (d - 1) / X.n)
    h_exact = None
    if compute_h:
        h_exact = cheeger_exact(X, budget=budget).value
    return LinkBound(h_link=float(h_link.exact), bound=bound, h_exact=h_exact)


def sphere_tuples(X: SimplicialComplex) -> np.ndarray:
    """(d+1)-vertex tuples whose codimension-one faces are all cells.

    These are the copies of the boundary of a d-simplex; the top cell
    itself need not be present.
    """
    d = X.dimension
    lower = X.cells(d - 1)
    rows = [
        c
        for c in combinations(range(X.n), d + 1)
        if all(c[:i] + c[i + 1 :] in lower for i in range(d + 1))
    ]
    if not rows:
        return np.empty((0, d + 1), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


def cheeger_tilde(
    X: SimplicialComplex, budget: int = PARTITION_BUDGET
) -> ExpansionReport:
    """Sphere-normalized Cheeger constant n*|F| / |F_boundary|.

    The denominator counts transversal simplex boundaries.  Partitions with
    denominator zero are skipped (the ratio is undefined there); if every
    partition is skipped the constant is reported as undefined.
    """
    n, d = X.n, X.dimension
    k = d + 1
    if n < k:
        raise PartitionError(f"need at least {k} vertices, got {n}")
    total = stirling2(n, k)
    if total > budget:
        raise BudgetError(f"{total} partitions exceed the budget of {budget}")
    cells = X.cells_array(d)
    spheres = sphere_tuples(X)
    best: Fraction | None = None
    best_assignment: np.ndarray | None = None
    evaluated = 0
    for chunk in _partition_chunks(n, k):
        evaluated += chunk.shape[0]
        if spheres.shape[0]:
            denom = _transversal_mask(spheres, chunk).sum(axis=-1)
        else:
            denom = np.zeros(chunk.shape[0], dtype=np.int64)
        if cells.shape[0]:
            counts = _transversal_mask(cells, chunk).sum(axis=-1)
        else:
            counts = np.zeros(chunk.shape[0], dtype=np.int64)
        for i in np.flatnonzero(denom > 0):
            ratio = Fraction(n * int(counts[i]), int(denom[i]))
            if best is None or ratio < best:
                best = ratio
                best_assignment = chunk[i].copy()
        if best == 0:
            break
    if best is None:
        return ExpansionReport(
            value=None, exact=None, argmin=None, method="exact", evaluated=evaluated
        )
    assert best_assignment is not None
    return ExpansionReport(
        value=float(best),
        exact=best,
        argmin=_blocks_from_assignment(best_assignment, k),
        method="exact",
        evaluated=evaluated,
    )
