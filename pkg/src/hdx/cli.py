"""Command-line interface: analyze, mixing, random, overlap.

Reports are line-oriented key/value text with fenced tab-separated tables,
printed to stdout or written to ``--output``; with an output path the
report figures are rendered as PNG files alongside it.  All randomized
paths run from an explicit or defaulted seed printed in the report header,
and identical invocations produce byte-identical output.

Exit codes: 0 success, 2 usage/input/parameter errors, 3 violations of an
audited bound (these indicate implementation bugs and carry a
machine-readable ``violation:`` JSON line in the report).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .complexes import (
    CellError,
    SimplicialComplex,
    bowtie,
    complete_complex,
    cycle_graph,
    from_top_cells,
    mobius_band,
    octahedron_with_pendant,
    path_graph,
)
from .expansion import (
    BudgetError,
    PartitionError,
    cheeger_exact,
    cheeger_local_search,
    mixing_audit,
    resolve_alpha,
)
from .io import (
    FormatError,
    dump_matrices,
    read_complex,
    read_placement,
)
from .overlap import (
    ConstantError,
    PlacementError,
    max_depth,
    overlap_upper_bound,
    spectral_overlap_bound,
)
from .random_complexes import (
    LMParams,
    ParameterError,
    cell_probability,
    run_trials,
    summarize_concentration,
)
from .reporting import (
    Report,
    figure_path,
    fmt,
    save_mixing_figure,
    save_placement_figure,
    save_spectrum_figure,
    save_trials_figure,
)
from .rng import DEFAULT_SEED
from .spectral import gap_routes, spectral_report

GAP_LEQ_H_TOL = 1e-9

_USAGE_ERRORS = (
    FormatError,
    ParameterError,
    PartitionError,
    CellError,
    ConstantError,
    PlacementError,
    BudgetError,
    ValueError,
)


class _Violations:
    """Collects bound violations; any entry makes the run exit nonzero."""

    def __init__(self) -> None:
        self.entries: list[dict] = []

    def add(self, kind: str, **data) -> None:
        self.entries.append({"kind": kind, **data})

    def emit(self, report: Report) -> None:
        report.kv("violations", len(self.entries))
        for entry in self.entries:
            report._lines.append(
                "violation: " + json.dumps(entry, sort_keys=True)
            )


def _parse_generate(tokens: list[str], seed: int) -> tuple[SimplicialComplex, str]:
    kind = tokens[0]
    kv: dict[str, str] = {}
    for token in tokens[1:]:
        if "=" not in token:
            raise ValueError(f"generator argument {token!r} is not key=value")
        key, value = token.split("=", 1)
        kv[key] = value
    desc = " ".join(["generate", *tokens])

    def need(*names: str) -> list[float]:
        out = []
        for name in names:
            if name not in kv:
                raise ValueError(f"generator {kind!r} needs {name}=...")
            out.append(float(kv[name]))
        return out

    if kind == "complete":
        n, d = need("n", "d")
        return complete_complex(int(n), int(d)), desc
    if kind == "lm":
        n, d = need("n", "d")
        if "p" in kv:
            p = float(kv["p"])
        elif "C" in kv:
            p = cell_probability(float(kv["C"]), int(n))
        else:
            raise ValueError("generator 'lm' needs p=... or C=...")
        params = LMParams(
            d=int(d), n=int(n), p=p, seed=int(kv.get("seed", seed))
        )
        from .random_complexes import linial_meshulam

        return linial_meshulam(params, trial=int(kv.get("trial", 0))), desc
    if kind == "mobius":
        return mobius_band(), desc
    if kind == "bowtie":
        return bowtie(), desc
    if kind == "octahedron-pendant":
        return octahedron_with_pendant(), desc
    if kind == "cycle":
        (n,) = need("n")
        return cycle_graph(int(n)), desc
    if kind == "path":
        (n,) = need("n")
        return path_graph(int(n)), desc
    raise ValueError(f"unknown generator {kind!r}")


def _load_complex(args) -> tuple[SimplicialComplex, str]:
    if args.input is not None and args.generate is not None:
        raise ValueError("give exactly one of --input and --generate")
    if args.input is not None:
        return read_complex(args.input), f"file {args.input}"
    if args.generate is not None:
        return _parse_generate(args.generate, args.seed)
    raise ValueError("give exactly one of --input and --generate")


def _alpha_list(args) -> list[str | float]:
    if not args.alpha:
        return ["auto"]
    out: list[str | float] = []
    for a in args.alpha:
        out.append(a if a in ("k", "auto") else float(a))
    return out


def _finish(report: Report, args, figures: list[tuple[str, callable]]) -> None:
    """Write or print the report; render figures next to an output file."""
    if args.output:
        report.write(args.output)
        if not args.no_figures:
            for suffix, render in figures:
                render(figure_path(args.output, suffix))
    else:
        sys.stdout.write(report.render())


def _blocks_str(blocks) -> str:
    return " | ".join(",".join(str(v) for v in b) for b in blocks)


def cmd_analyze(args) -> int:
    X, desc = _load_complex(args)
    violations = _Violations()
    report = Report("analyze")
    report.kv("seed", args.seed)
    report.kv("input", desc)
    report.kv("n", X.n)
    report.kv("dimension", X.dimension)
    report.kv(
        "cells", " ".join(str(X.num_cells(j)) for j in range(-1, X.dimension + 1))
    )
    complete = X.is_complete_skeleton()
    report.kv("complete_skeleton", complete)

    alphas = [resolve_alpha(X, a) for a in _alpha_list(args)] if complete else ()
    spec = spectral_report(X, alphas=tuple(alphas))
    routes = gap_routes(X)
    report.kv("spectral_gap", spec.gap)
    report.kv("gap_index", spec.r)
    report.kv("gap_route_restricted", routes.restricted_min)
    report.kv("gap_route_sorted_index", routes.lambda_r)
    report.kv("gap_route_full_min", routes.full_min)
    report.kv("betti", " ".join(str(b) for b in spec.betti))
    trace = int((X.dimension + 1) * X.num_cells(X.dimension))
    report.kv("trace_upper_laplacian", trace)
    report.kv("delta", spec.delta)
    report.kv("k_avg", spec.k_avg)
    report.kv("lambda_avg", spec.lambda_avg)
    report.kv("density_residual", spec.density_residual)
    for alpha in alphas:
        report.kv(f"rho[alpha={fmt(alpha)}]", spec.rho[alpha])

    try:
        h = cheeger_exact(X, budget=args.budget)
    except BudgetError:
        h = cheeger_local_search(X, seed=args.seed)
    report.kv("h", h.value)
    report.kv("h_exact", h.exact)
    report.kv("h_method", h.method)
    report.kv("h_argmin", _blocks_str(h.argmin))
    if complete:
        ok = spec.gap <= h.value + GAP_LEQ_H_TOL
        report.kv("cheeger_inequality", "ok" if ok else "violated")
        if not ok:
            violations.add(
                "cheeger-inequality", gap=spec.gap, h=h.value, method=h.method
            )

    if spec.spectrum is not None:
        report.table(
            "spectrum",
            ["index", "value"],
            [(i, v) for i, v in enumerate(spec.spectrum)],
        )
    if spec.restricted_spectrum is not None:
        report.table(
            "restricted_spectrum",
            ["index", "value"],
            [(i, v) for i, v in enumerate(spec.restricted_spectrum)],
        )
    violations.emit(report)

    if args.dump_matrices:
        dump_matrices(X, args.dump_matrices)

    figures = []
    if spec.spectrum is not None:
        figures.append(
            (
                "spectrum",
                lambda p: save_spectrum_figure(
                    spec.spectrum, spec.r, spec.gap, p, spec.restricted_spectrum
                ),
            )
        )
    _finish(report, args, figures)
    return 3 if violations.entries else 0


def cmd_mixing(args) -> int:
    X, desc = _load_complex(args)
    if not X.is_complete_skeleton():
        raise ValueError(
            "the mixing audit requires a complete skeleton; "
            f"{desc} does not have one"
        )
    violations = _Violations()
    audit = mixing_audit(
        X,
        alphas=_alpha_list(args),
        exhaustive=True if args.exhaustive_tuples else None,
        seed=args.seed,
        samples=args.samples,
    )
    report = Report("mixing")
    report.kv("seed", args.seed)
    report.kv("input", desc)
    report.kv("n", X.n)
    report.kv("dimension", X.dimension)
    report.kv("exhaustive", audit.exhaustive)
    report.kv("audited_tuples", audit.audited)
    for res in audit.results:
        tag = f"alpha={fmt(res.alpha)}"
        report.kv(f"rho[{tag}]", res.rho)
        report.kv(f"violations[{tag}]", res.violations)
        report.kv(f"min_slack[{tag}]", res.min_slack)
        report.kv(f"min_slack_geometric[{tag}]", res.min_slack_per_bound[0])
        report.kv(f"min_slack_ordered[{tag}]", res.min_slack_per_bound[1])
        report.kv(f"min_slack_refined[{tag}]", res.min_slack_per_bound[2])
        if res.violations:
            violations.add(
                "mixing-bound", alpha=res.alpha, count=res.violations
            )
        if res.records:
            report.table(
                f"tuples[{tag}]",
                [
                    "sizes",
                    "F",
                    "expected",
                    "deviation",
                    "bound_geometric",
                    "bound_ordered",
                    "bound_refined",
                    "slack",
                ],
                [
                    (
                        ",".join(str(s) for s in r.sizes),
                        r.count,
                        r.expected,
                        r.deviation,
                        r.bound_geometric,
                        r.bound_ordered,
                        r.bound_refined,
                        r.slack,
                    )
                    for r in res.records
                ],
            )
    violations.emit(report)
    figures = []
    if any(res.records for res in audit.results):
        figures.append(
            ("bounds", lambda p: save_mixing_figure(audit.results, p))
        )
    _finish(report, args, figures)
    return 3 if violations.entries else 0


def cmd_random(args) -> int:
    if not args.generate or args.generate[0] != "lm":
        raise ValueError("the random command needs --generate lm n=... d=... C=...")
    kv = dict(t.split("=", 1) for t in args.generate[1:])
    n = int(kv["n"])
    d = int(kv["d"])
    if "C" in kv:
        C = float(kv["C"])
    elif "p" in kv:
        C = float(kv["p"]) * n
    else:
        raise ValueError("the lm generator needs C=... or p=...")
    p = cell_probability(C, n)
    seed = int(kv.get("seed", args.seed))
    violations = _Violations()
    params, records = run_trials(d, n, C, args.trials, seed=seed, with_h=True)
    summary = summarize_concentration(params, records, gamma=args.gamma)

    report = Report("random")
    report.kv("seed", seed)
    report.kv("n", n)
    report.kv("dimension", d)
    report.kv("C", C)
    report.kv("p", p)
    report.kv("trials", args.trials)
    report.kv("center_np", summary.center)
    report.kv("gamma_hat", summary.gamma_hat)
    report.kv(
        "interval",
        None
        if summary.interval is None
        else f"{fmt(summary.interval[0])} {fmt(summary.interval[1])}",
    )
    report.kv("deviation_scale", summary.deviation_scale)
    report.kv("fraction_inside_apriori", summary.fraction_inside_apriori)
    if records:
        log_n = math.log(n)
        report.kv("H_estimate", min(r.gap for r in records) / log_n)
        report.kv(
            "isolated_fraction",
            sum(r.isolated for r in records) / len(records),
        )
        for r in records:
            if r.h_value is not None and r.gap > r.h_value + GAP_LEQ_H_TOL:
                violations.add(
                    "cheeger-inequality",
                    trial=r.trial,
                    gap=r.gap,
                    h=r.h_value,
                    method=r.h_method,
                )
    report.table(
        "trials",
        [
            "trial",
            "top_cells",
            "gap",
            "spec_min",
            "spec_max",
            "h",
            "h_method",
            "isolated",
        ],
        [
            (
                r.trial,
                r.top_cells,
                r.gap,
                r.spec_min,
                r.spec_max,
                r.h_value,
                r.h_method,
                r.isolated,
            )
            for r in records
        ],
    )
    violations.emit(report)
    figures = []
    if records:
        figures.append(
            ("trials", lambda p: save_trials_figure(records, summary.center, p))
        )
    _finish(report, args, figures)
    return 3 if violations.entries else 0


def cmd_overlap(args) -> int:
    X, desc = _load_complex(args)
    report = Report("overlap")
    report.kv("seed", args.seed)
    report.kv("input", desc)
    report.kv("n", X.n)
    report.kv("dimension", X.dimension)
    report.kv("top_cells", X.num_cells(X.dimension))
    figures = []
    witness = None
    placement = None
    if args.placement:
        placement = read_placement(args.placement, X.n, X.dimension)
        result = max_depth(X, placement, samples=args.samples, seed=args.seed)
        report.kv("mode", "placement")
        report.kv("witness", " ".join(fmt(x) for x in result.point))
        report.kv("depth", result.depth)
        report.kv("fraction", result.fraction)
        report.kv("exact", result.exact)
        witness = result.point
        if args.verbose:
            report.table(
                "containment",
                ["cell", "contains_witness"],
                [
                    (",".join(str(v) for v in c), m)
                    for c, m in zip(X.sorted_cells(X.dimension), result.mask)
                ],
            )
    else:
        search = overlap_upper_bound(
            X, strategy=args.strategy, seed=args.seed, iterations=args.iterations
        )
        report.kv("mode", f"search ({args.strategy})")
        report.kv("upper_bound", search.fraction)
        report.kv("evaluations", search.evaluations)
        placement = search.placement
    if args.cd is not None:
        bound = spectral_overlap_bound(X, args.cd)
        report.kv("cd", bound.c_d)
        report.kv("k_avg", bound.k_avg)
        report.kv("lambda_avg", bound.lambda_avg)
        report.kv("eps", bound.eps)
        report.kv("eps_prime", bound.eps_prime)
        report.kv("spectral_bound_degree", bound.bound_degree)
        report.kv("spectral_bound_average", bound.bound_average)
        report.kv("spectral_lower_bound", bound.value)
        report.kv("vacuous", bound.vacuous)
    report.kv("violations", 0)
    if placement is not None and X.dimension <= 2:
        pl = placement
        wit = witness
        figures.append(
            ("placement", lambda p: save_placement_figure(X, pl, wit, p))
        )
    _finish(report, args, figures)
    return 0


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--input", help="complex file (JSON with n, top_cells)")
    sub.add_argument(
        "--generate",
        nargs="+",
        metavar="SPEC",
        help="generator spec, e.g. 'complete n=5 d=2', 'lm n=50 d=2 C=0.5', 'mobius'",
    )
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("--output", help="write the report here (figures alongside)")
    sub.add_argument(
        "--no-figures", action="store_true", help="skip figure rendering"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdx",
        description="Spectral and isoperimetric analysis of simplicial complexes.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("analyze", help="spectrum, gap, Betti numbers, Cheeger constant")
    _add_common(p)
    p.add_argument("--alpha", action="append", help="k, auto, or a number (repeatable)")
    p.add_argument("--budget", type=int, default=10**8)
    p.add_argument("--dump-matrices", metavar="DIR")
    p.set_defaults(func=cmd_analyze)

    p = subs.add_parser("mixing", help="audit the discrepancy bounds")
    _add_common(p)
    p.add_argument("--alpha", action="append", help="k, auto, or a number (repeatable)")
    p.add_argument("--exhaustive-tuples", action="store_true")
    p.add_argument("--samples", type=int, default=2000)
    p.set_defaults(func=cmd_mixing)

    p = subs.add_parser("random", help="random-complex experiments")
    _add_common(p)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--gamma", type=float, help="a-priori gamma for the coverage check")
    p.set_defaults(func=cmd_random)

    p = subs.add_parser("overlap", help="depth, placement search, spectral bound")
    _add_common(p)
    p.add_argument("--placement", help="placement file (id x_1 ... x_d per line)")
    p.add_argument(
        "--strategy",
        choices=["random", "adversarial-descent"],
        default="random",
    )
    p.add_argument("--iterations", type=int, default=50)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--cd", type=float, help="selection constant in (0,1]")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_overlap)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _USAGE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
