"""Combinatorial layer: construction, closure, degrees, links, complements."""

import math
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdx.complexes import (
    CellError,
    OrientedCell,
    bowtie,
    complete_complex,
    from_top_cells,
    mobius_band,
    normalize_cell,
    sort_with_sign,
)


def test_from_top_cells_single_triangle():
    X = from_top_cells(3, [(0, 1, 2)])
    assert [X.num_cells(j) for j in range(-1, 3)] == [1, 3, 3, 1]


def test_from_top_cells_bowtie_counts():
    X = bowtie()
    assert X.num_cells(2) == 2
    assert X.num_cells(1) == 6
    assert X.num_cells(0) == 5


def test_from_top_cells_empty_is_zero_dimensional():
    X = from_top_cells(4, [])
    assert X.dimension == 0
    assert X.num_cells(0) == 4
    assert X.num_cells(-1) == 1


def test_malformed_cells_rejected():
    with pytest.raises(CellError):
        from_top_cells(4, [(1, 1, 2)])
    with pytest.raises(CellError):
        from_top_cells(3, [(0, 1, 5)])
    with pytest.raises(CellError):
        normalize_cell([2, 2])


def test_complete_complex_counts():
    X = complete_complex(5, 2)
    assert X.num_cells(2) == math.comb(5, 3) == 10
    assert X.num_cells(1) == math.comb(5, 2) == 10
    K4 = complete_complex(4, 1)
    assert K4.num_cells(1) == 6
    with pytest.raises(CellError):
        complete_complex(3, 3)


def test_is_complete_skeleton():
    assert not bowtie().is_complete_skeleton()
    assert mobius_band().is_complete_skeleton()
    assert complete_complex(4, 2).is_complete_skeleton()


def test_degree():
    T = from_top_cells(3, [(0, 1, 2)])
    assert T.degree((0, 1)) == 1
    K = complete_complex(5, 2)
    for e in K.cells(1):
        assert K.degree(e) == 3  # n - d
    B = bowtie()
    assert B.degree((0, 1)) == 1
    assert B.degree((2,)) == 4
    with pytest.raises(CellError):
        B.degree((0, 3))


def test_link_of_triangle_vertex():
    T = from_top_cells(3, [(0, 1, 2)])
    link = T.link((0,))
    assert link.vertices == (1, 2)
    assert link.complex.num_cells(1) == 1


def test_link_mobius_vertices_are_paths():
    M = mobius_band()
    for v in range(5):
        link = M.link((v,))
        g = link.complex
        assert g.n == 4
        assert g.num_cells(1) == 3
        degrees = sorted(g.degree((u,)) for u in range(g.n))
        assert degrees == [1, 1, 2, 2]  # a path on 4 vertices


def test_link_complete_complex_is_complete_graph():
    K = complete_complex(5, 2)
    link = K.link((0,))
    assert link.complex.n == 4
    assert link.complex.num_cells(1) == 6


def test_link_of_empty_cell_is_whole_complex():
    M = mobius_band()
    link = M.link(())
    assert link.vertices == tuple(range(5))
    assert link.complex.cells(2) == M.cells(2)


def test_complement():
    K = complete_complex(4, 2)
    assert K.complement().num_cells(2) == 0
    M = mobius_band()
    comp = M.complement()
    assert comp.num_cells(2) == 5
    assert comp.cells(2).isdisjoint(M.cells(2))
    # involution
    assert comp.complement().cells(2) == M.cells(2)
    with pytest.raises(ValueError):
        bowtie().complement()


def test_facets_roundtrip():
    M = mobius_band()
    assert set(M.facets()) == M.cells(2)
    B = from_top_cells(5, [(0, 1, 2), (3, 4)])
    assert set(B.facets()) == {(0, 1, 2), (3, 4)}


def test_sort_with_sign():
    assert sort_with_sign([0, 1, 2]) == ((0, 1, 2), 1)
    assert sort_with_sign([1, 0, 2]) == ((0, 1, 2), -1)
    assert sort_with_sign([2, 0, 1]) == ((0, 1, 2), 1)
    with pytest.raises(CellError):
        sort_with_sign([1, 1])


def test_oriented_cell_flip():
    c = OrientedCell.from_vertices([3, 1, 2])
    assert c.cell == (1, 2, 3)
    assert c.flipped().sign == -c.sign


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=7),
    data=st.data(),
)
def test_closure_properties(n, data):
    cells = data.draw(
        st.lists(
            st.lists(
                st.integers(min_value=0, max_value=n - 1),
                min_size=1,
                max_size=4,
                unique=True,
            ),
            max_size=6,
        )
    )
    X = from_top_cells(n, cells)
    # downward closure: every facet of every cell is a cell
    for j in range(X.dimension + 1):
        for c in X.cells(j):
            for i in range(len(c)):
                assert c[:i] + c[i + 1 :] in X
    assert X.num_cells(-1) == 1
    assert X.num_cells(0) == n
    # degree agrees with naive coface counting
    for j in range(X.dimension):
        for c in X.cells(j):
            naive = sum(
                1
                for u in combinations(range(n), j + 2)
                if set(c) <= set(u) and u in X
            )
            assert X.degree(c) == naive


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(min_value=4, max_value=6),
    data=st.data(),
)
def test_complement_involution_random(n, data):
    tops = data.draw(
        st.sets(
            st.tuples(
                st.integers(0, n - 1), st.integers(0, n - 1), st.integers(0, n - 1)
            ).filter(lambda t: len(set(t)) == 3),
            max_size=6,
        )
    )
    base = complete_complex(n, 2).cells(1)
    X = from_top_cells(n, list(base) + [tuple(sorted(t)) for t in tops], dimension=2)
    assert X.is_complete_skeleton()
    comp = X.complement()
    assert comp.num_cells(2) + X.num_cells(2) == math.comb(n, 3)
    assert comp.complement().cells(2) == X.cells(2)
