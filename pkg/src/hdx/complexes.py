"""Finite abstract simplicial complexes and their combinatorial queries.

Cells are stored in canonical (sorted) form; an orientation is a vertex
ordering, carried around as a sign relative to the sorted order.  A built
complex is immutable (and therefore hashable and safely shareable).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

Cell = tuple[int, ...]

EMPTY_CELL: Cell = ()


class CellError(ValueError):
    """A malformed cell, an out-of-range vertex, or a non-member cell."""


def normalize_cell(vertices: Iterable[int]) -> Cell:
    """Canonical (sorted) form of a cell; rejects repeated vertices."""
    cell = tuple(sorted(int(v) for v in vertices))
    if len(set(cell)) != len(cell):
        raise CellError(f"cell {cell} has repeated vertices")
    return cell


def sort_with_sign(vertices: Sequence[int]) -> tuple[Cell, int]:
    """Sort an oriented vertex list, returning (canonical cell, sign).

    The sign is the parity of the sorting permutation, so that
    ``[v_0,...,v_j] = sign * [sorted]`` as oriented cells.
    """
    order = list(vertices)
    if len(set(order)) != len(order):
        raise CellError(f"oriented cell {tuple(order)} has repeated vertices")
    sign = 1
    # insertion sort; cells are tiny so the quadratic inversion count is fine
    for i in range(1, len(order)):
        j = i
        while j > 0 and order[j - 1] > order[j]:
            order[j - 1], order[j] = order[j], order[j - 1]
            sign = -sign
            j -= 1
    return tuple(order), sign


@dataclass(frozen=True)
class OrientedCell:
    """A cell with a vertex ordering, stored canonically as (cell, sign)."""

    cell: Cell
    sign: int

    @classmethod
    def from_vertices(cls, vertices: Sequence[int]) -> "OrientedCell":
        cell, sign = sort_with_sign(vertices)
        return cls(cell, sign)

    def flipped(self) -> "OrientedCell":
        return OrientedCell(self.cell, -self.sign)


@dataclass(frozen=True)
class SimplicialComplex:
    """A finite d-dimensional simplicial complex on vertices 0..n-1.

    ``cells_by_dim[j + 1]`` holds the set of j-cells, for j = -1..d; the
    empty cell is always present and every vertex is a 0-cell (isolated
    vertices are allowed).  The collection is downward closed.
    """

    n: int
    dimension: int
    cells_by_dim: tuple[frozenset[Cell], ...]

    def cells(self, j: int) -> frozenset[Cell]:
        """The set of j-cells, for -1 <= j <= dimension."""
        if j < -1 or j > self.dimension:
            return frozenset()
        return self.cells_by_dim[j + 1]

    def sorted_cells(self, j: int) -> list[Cell]:
        return sorted(self.cells(j))

    def num_cells(self, j: int) -> int:
        return len(self.cells(j))

    def __contains__(self, cell: Iterable[int]) -> bool:
        c = tuple(cell)
        j = len(c) - 1
        return c in self.cells(j)

    def _require_cell(self, cell: Iterable[int]) -> Cell:
        c = normalize_cell(cell)
        if c not in self:
            raise CellError(f"{c} is not a cell of the complex")
        return c

    def degree(self, cell: Iterable[int]) -> int:
        """Number of (j+1)-cells containing the given j-cell."""
        c = self._require_cell(cell)
        j = len(c) - 1
        upper = self.cells(j + 1)
        cset = set(c)
        return sum(
            1
            for v in range(self.n)
            if v not in cset and tuple(sorted((v, *c))) in upper
        )

    def coface_vertices(self, cell: Iterable[int]) -> list[int]:
        """Vertices v with v ~ cell (v not in cell, cell + {v} a cell)."""
        c = self._require_cell(cell)
        upper = self.cells(len(c))
        cset = set(c)
        return [
            v
            for v in range(self.n)
            if v not in cset and tuple(sorted((v, *c))) in upper
        ]

    def is_complete_skeleton(self) -> bool:
        """True iff every possible j-cell with j < dimension is present."""
        return all(
            self.num_cells(j) == math.comb(self.n, j + 1)
            for j in range(self.dimension)
        )

    def link(self, cell: Iterable[int]) -> "Link":
        """The link of a cell, as a complex over relabeled vertices.

        For a (d-2)-cell the link is the graph whose vertices and edges
        correspond to the (d-1)- and d-cells of the complex containing it.
        """
        tau = self._require_cell(cell)
        tau_set = set(tau)
        link_dim = self.dimension - len(tau)
        vertices = tuple(self.coface_vertices(tau))
        index = {v: i for i, v in enumerate(vertices)}
        top: list[Cell] = []
        for j in range(link_dim + 1):
            for sigma in self.cells(j + len(tau)):
                rest = [v for v in sigma if v not in tau_set]
                if len(rest) == j + 1 and tau_set.issubset(sigma):
                    top.append(tuple(index[v] for v in rest))
        graph = from_top_cells(len(vertices), top, dimension=max(link_dim, 0))
        return Link(complex=graph, vertices=vertices)

    def complement(self) -> "SimplicialComplex":
        """Complement complex: same complete skeleton, complementary top cells."""
        if not self.is_complete_skeleton():
            raise ValueError("complement requires a complete skeleton")
        d = self.dimension
        present = self.cells(d)
        top: list[Cell] = list(combinations(range(self.n), d))
        top += [
            c for c in combinations(range(self.n), d + 1) if c not in present
        ]
        return from_top_cells(self.n, top, dimension=d)

    def facets(self) -> list[Cell]:
        """Maximal cells (used when writing the complex back to disk)."""
        maximal: list[Cell] = []
        for j in range(self.dimension, -1, -1):
            for c in self.sorted_cells(j):
                cset = set(c)
                if not any(cset < set(m) for m in maximal):
                    maximal.append(c)
        return sorted(maximal, key=lambda c: (len(c), c))

    def cells_array(self, j: int) -> np.ndarray:
        """The j-cells as an (m, j+1) integer array in lexicographic order."""
        cells = self.sorted_cells(j)
        if not cells:
            return np.empty((0, j + 1), dtype=np.int64)
        return np.array(cells, dtype=np.int64)


@dataclass(frozen=True)
class Link:
    """A link subcomplex together with the original ids of its vertices."""

    complex: SimplicialComplex
    vertices: tuple[int, ...]


def from_top_cells(
    n: int,
    top_cells: Iterable[Iterable[int]],
    dimension: int | None = None,
) -> SimplicialComplex:
    """Smallest downward-closed complex on n vertices containing the cells.

    Mixed-dimension input is allowed; the complex dimension is the maximum
    cell dimension unless a larger ``dimension`` is declared explicitly
    (useful for complexes with no top-dimensional cells).
    """
    if n < 0:
        raise CellError("vertex count must be non-negative")
    tops = [normalize_cell(c) for c in top_cells]
    for c in tops:
        if c and (c[0] < 0 or c[-1] >= n):
            raise CellError(f"cell {c} has a vertex outside 0..{n - 1}")
    d = max((len(c) - 1 for c in tops), default=0)
    if dimension is not None:
        if dimension < d:
            raise CellError(
                f"declared dimension {dimension} below top cell dimension {d}"
            )
        d = dimension
    by_dim: list[set[Cell]] = [set() for _ in range(d + 2)]
    by_dim[0].add(EMPTY_CELL)
    for v in range(n):
        by_dim[1].add((v,))
    for c in tops:
        for j in range(1, len(c) + 1):
            for face in combinations(c, j):
                by_dim[j].add(face)
    return SimplicialComplex(
        n=n,
        dimension=d,
        cells_by_dim=tuple(frozenset(s) for s in by_dim),
    )


def complete_complex(n: int, d: int) -> SimplicialComplex:
    """The complete d-complex on n vertices: every cell of size <= d+1."""
    if not 1 <= d < n:
        raise CellError(f"complete complex needs 1 <= d < n, got d={d}, n={n}")
    return from_top_cells(n, combinations(range(n), d + 1))


def path_graph(n: int) -> SimplicialComplex:
    return from_top_cells(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> SimplicialComplex:
    return from_top_cells(n, [(i, (i + 1) % n) for i in range(n)])


def mobius_band() -> SimplicialComplex:
    """The 5-vertex minimal triangulation of the Möbius band.

    Triangles {i, i+1, i+3} mod 5; its edge set is the complete graph K_5.
    """
    return from_top_cells(5, [((i, (i + 1) % 5, (i + 3) % 5)) for i in range(5)])


def bowtie() -> SimplicialComplex:
    """Two triangles sharing a single vertex, on 5 vertices."""
    return from_top_cells(5, [(0, 1, 2), (2, 3, 4)])


def octahedron_with_pendant() -> SimplicialComplex:
    """Octahedron boundary with one tetrahedron glued to a facet.

    A 3-complex on 7 vertices: the triangulated 2-sphere {0..5} (poles 0, 1
    and equator 2-3-4-5) plus the tetrahedron {0, 2, 3, 6}.
    """
    sphere = [
        (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 2, 5),
        (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 2, 5),
    ]
    return from_top_cells(7, sphere + [(0, 2, 3, 6)])
