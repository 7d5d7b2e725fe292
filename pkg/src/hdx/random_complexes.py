"""Random complexes with complete skeletons, and expansion experiments.

The generator includes each top cell independently with probability p,
drawing once per candidate cell in lexicographic order from a Philox
stream keyed by (seed, trial), so runs are reproducible and trials are
independent.

The experiments take a density constant C with p = C / n, so C is the
expected upper degree n*p; deviations of the restricted spectrum from
n*p are reported in units of log n and of sqrt(n*p*log n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .complexes import Cell, SimplicialComplex, from_top_cells
from .expansion import (
    BudgetError,
    cheeger_exact,
    cheeger_local_search,
    count_F,
    isolated_cell_witness,
)
from .operators import DENSE_LIMIT, restricted_extremes, restriction_to_cycles, upper_laplacian
from .rng import DEFAULT_SEED, derive_rng
from .spectral import symmetric_spectrum

EXACT_CHEEGER_MAX_N = 12


class ParameterError(ValueError):
    """Invalid generator or experiment parameters."""


@dataclass(frozen=True)
class LMParams:
    """Parameters of the random d-complex with a complete skeleton."""

    d: int
    n: int
    p: float
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ParameterError("dimension must be at least 1")
        if self.n <= self.d:
            raise ParameterError("need more vertices than the dimension")
        if not 0.0 < self.p < 1.0:
            raise ParameterError(f"cell probability must be in (0,1), got {self.p}")


def linial_meshulam(
    params: LMParams, trial: int = 0
) -> SimplicialComplex:
    """Sample a random complex: complete skeleton plus independent top cells."""
    rng = derive_rng(params.seed, stream=trial)
    candidates = list(combinations(range(params.n), params.d + 1))
    draws = rng.random(len(candidates))
    top = [c for c, u in zip(candidates, draws) if u < params.p]
    skeleton = combinations(range(params.n), params.d)
    return from_top_cells(
        params.n, list(skeleton) + top, dimension=params.d
    )


def isolated_cell_check(X: SimplicialComplex) -> Optional[Cell]:
    """A (d-1)-cell of degree zero if one exists, else None."""
    for cell in X.sorted_cells(X.dimension - 1):
        if X.degree(cell) == 0:
            return cell
    return None


def cell_probability(C: float, n: int) -> float:
    """Density constant to cell probability: p = C / n (C is the mean upper degree)."""
    p = C / n
    if not 0.0 < p < 1.0:
        raise ParameterError(
            f"density constant C={C} gives p={p:.6g} outside (0,1) at n={n}"
        )
    return p


@dataclass(frozen=True)
class TrialRecord:
    """Per-trial measurements emitted by the experiment tables."""

    trial: int
    top_cells: int
    gap: float
    spec_min: float
    spec_max: float
    h_value: float | None
    h_method: str
    isolated: bool


@dataclass(frozen=True)
class ConcentrationResult:
    """Spread of the restricted spectra around the expected degree."""

    params: LMParams
    center: float  # n * p
    trials: list[TrialRecord]
    gamma_hat: float | None
    interval: tuple[float, float] | None
    deviation_scale: float  # sqrt(n p log n)
    fraction_inside_apriori: float | None


def _restricted_range(X: SimplicialComplex) -> tuple[float, float]:
    m = X.num_cells(X.dimension - 1)
    up = upper_laplacian(X)
    if m <= DENSE_LIMIT:
        vals = symmetric_spectrum(restriction_to_cycles(X, up))
        return float(vals[0]), float(vals[-1])
    return restricted_extremes(X, up)


def _h_estimate(X: SimplicialComplex, seed: int) -> tuple[float | None, str]:
    """Exact Cheeger constant when enumeration is cheap, else an upper bound."""
    if X.n <= EXACT_CHEEGER_MAX_N:
        try:
            return cheeger_exact(X).value, "exact"
        except BudgetError:
            pass
    iso = isolated_cell_check(X)
    if iso is not None:
        # the witnessing partition certifies the constant exactly
        assert count_F(X, isolated_cell_witness(X, iso)) == 0
        return 0.0, "witness"
    report = cheeger_local_search(X, seed=seed, restarts=8)
    return report.value, "local-search"


def run_trials(
    d: int,
    n: int,
    C: float,
    trials: int,
    seed: int = DEFAULT_SEED,
    with_h: bool = True,
) -> tuple[LMParams, list[TrialRecord]]:
    """Generate seeded trials and measure spectrum, gap, h, isolated cells."""
    p = cell_probability(C, n)
    params = LMParams(d=d, n=n, p=p, seed=seed)
    records = []
    for t in range(trials):
        X = linial_meshulam(params, trial=t)
        lo, hi = _restricted_range(X)
        iso = isolated_cell_check(X)
        h_value: float | None = None
        h_method = "skipped"
        if with_h:
            h_value, h_method = _h_estimate(X, seed=seed)
        records.append(
            TrialRecord(
                trial=t,
                top_cells=X.num_cells(d),
                gap=lo,  # the restricted minimum is the spectral gap
                spec_min=lo,
                spec_max=hi,
                h_value=h_value,
                h_method=h_method,
                isolated=iso is not None,
            )
        )
    return params, records


def summarize_concentration(
    params: LMParams,
    records: list[TrialRecord],
    gamma: float | None = None,
) -> ConcentrationResult:
    """Concentration summary of already-measured trials."""
    n, p = params.n, params.p
    center = n * p
    log_n = math.log(n)
    scale = math.sqrt(n * p * log_n)
    if not records:
        return ConcentrationResult(
            params=params,
            center=center,
            trials=[],
            gamma_hat=None,
            interval=None,
            deviation_scale=scale,
            fraction_inside_apriori=None,
        )
    deviations = [
        max(abs(r.spec_min - center), abs(r.spec_max - center)) for r in records
    ]
    gamma_hat = max(deviations) / log_n
    interval = (center - gamma_hat * log_n, center + gamma_hat * log_n)
    fraction = None
    if gamma is not None:
        inside = sum(
            1
            for r in records
            if center - gamma * log_n <= r.spec_min
            and r.spec_max <= center + gamma * log_n
        )
        fraction = inside / len(records)
    return ConcentrationResult(
        params=params,
        center=center,
        trials=records,
        gamma_hat=gamma_hat,
        interval=interval,
        deviation_scale=scale,
        fraction_inside_apriori=fraction,
    )


def concentration_experiment(
    d: int,
    n: int,
    C: float,
    trials: int,
    seed: int = DEFAULT_SEED,
    gamma: float | None = None,
) -> ConcentrationResult:
    """Measure how tightly restricted spectra concentrate around n*p.

    Reports the empirical gamma_hat = max |eigenvalue - n*p| / log n over
    all trials (every spectrum lies inside the fitted interval by
    construction) and, when an a-priori gamma is supplied, the fraction of
    trials whose spectrum lies inside its interval.
    """
    params, records = run_trials(d, n, C, trials, seed=seed, with_h=False)
    return summarize_concentration(params, records, gamma=gamma)


@dataclass(frozen=True)
class CheegerBoundSummary:
    """Spectral lower bounds on expansion across seeded trials."""

    params: LMParams
    trials: list[TrialRecord]
    min_gap: float | None
    H_estimate: float | None  # min gap / log n
    min_h_over_log: float | None
    isolated_fraction: float | None


def cheeger_lower_bound_experiment(
    d: int,
    n: int,
    C: float,
    trials: int,
    seed: int = DEFAULT_SEED,
) -> CheegerBoundSummary:
    """Certified expansion lower bounds: the gap bounds h from below."""
    params_probe = cell_probability(C, n)  # validate before running
    params, records = run_trials(d, n, C, trials, seed=seed, with_h=True)
    assert params.p == params_probe
    if not records:
        return CheegerBoundSummary(
            params=params,
            trials=[],
            min_gap=None,
            H_estimate=None,
            min_h_over_log=None,
            isolated_fraction=None,
        )
    log_n = math.log(n)
    min_gap = min(r.gap for r in records)
    h_values = [r.h_value for r in records if r.h_value is not None]
    return CheegerBoundSummary(
        params=params,
        trials=records,
        min_gap=min_gap,
        H_estimate=min_gap / log_n,
        min_h_over_log=(min(h_values) / log_n) if h_values else None,
        isolated_fraction=sum(r.isolated for r in records) / len(records),
    )
