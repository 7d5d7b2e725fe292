"""Shared fixtures: the test corpus of small complexes."""

from __future__ import annotations

import pytest

from hdx.complexes import (
    SimplicialComplex,
    bowtie,
    complete_complex,
    cycle_graph,
    from_top_cells,
    mobius_band,
    octahedron_with_pendant,
    path_graph,
)
from hdx.random_complexes import LMParams, linial_meshulam

CORPUS_SEED = 90210


def lm_sample(n: int, d: int, p: float, trial: int = 0) -> SimplicialComplex:
    return linial_meshulam(LMParams(d=d, n=n, p=p, seed=CORPUS_SEED), trial=trial)


def corpus() -> dict[str, SimplicialComplex]:
    """Small named complexes exercised by the identity suites."""
    return {
        "mobius": mobius_band(),
        "bowtie": bowtie(),
        "complete_4_2": complete_complex(4, 2),
        "complete_5_2": complete_complex(5, 2),
        "complete_6_2": complete_complex(6, 2),
        "complete_5_3": complete_complex(5, 3),
        "k4": complete_complex(4, 1),
        "cycle_4": cycle_graph(4),
        "path_3": path_graph(3),
        "octahedron_pendant": octahedron_with_pendant(),
        "lm_7": lm_sample(7, 2, 0.5),
        "lm_8": lm_sample(8, 2, 0.35),
        "single_triangle": from_top_cells(3, [(0, 1, 2)]),
        "no_top": from_top_cells(4, [(0, 1), (1, 2), (2, 3)], dimension=2),
    }


@pytest.fixture(scope="session")
def all_complexes() -> dict[str, SimplicialComplex]:
    return corpus()


@pytest.fixture(scope="session")
def complete_skeleton_complexes(all_complexes) -> dict[str, SimplicialComplex]:
    return {
        name: X
        for name, X in all_complexes.items()
        if X.is_complete_skeleton() and X.dimension >= 1
    }
