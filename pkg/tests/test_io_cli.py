"""File formats, matrix dumps, CLI commands, and output determinism."""

import json
from pathlib import Path

import numpy as np
import pytest

from hdx.cli import main
from hdx.complexes import bowtie, complete_complex, mobius_band
from hdx.io import (
    FormatError,
    dump_matrices,
    read_complex,
    read_placement,
    write_complex,
    write_placement,
)
from hdx.operators import boundary_matrix


def test_complex_roundtrip(tmp_path):
    M = mobius_band()
    path = tmp_path / "mobius.json"
    write_complex(M, path)
    back = read_complex(path)
    assert back == M


def test_complex_format_whitespace_insensitive(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{\n  "n":  3,\n\n  "top_cells": [ [0, 1,   2] ]\n}\n')
    X = read_complex(path)
    assert X.num_cells(2) == 1


def test_complex_format_rejects_repeats(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 3, "top_cells": [[0, 0, 1]]}')
    with pytest.raises(FormatError):
        read_complex(path)


def test_complex_format_rejects_unsorted(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 3, "top_cells": [[1, 0, 2]]}')
    with pytest.raises(FormatError):
        read_complex(path)


def test_complex_format_syntax_error_has_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 3,\n "top_cells": [[0, 1, 2]\n}')
    with pytest.raises(FormatError) as err:
        read_complex(path)
    assert "line" in str(err.value)


def test_placement_roundtrip(tmp_path):
    points = np.array([[0.25, -1.5], [3.0, 2.0], [1e-3, 7.125]])
    path = tmp_path / "pl.txt"
    write_placement(points, path)
    back = read_placement(path, 3, 2)
    assert np.array_equal(points, back)


def test_placement_missing_vertex(tmp_path):
    path = tmp_path / "pl.txt"
    path.write_text("0 0.0 0.0\n1 1.0 1.0\n")
    with pytest.raises(FormatError):
        read_placement(path, 3, 2)


def test_dump_matrices(tmp_path):
    M = mobius_band()
    files = dump_matrices(M, tmp_path / "mats")
    names = {f.name for f in files}
    assert {"boundary_0.txt", "boundary_1.txt", "boundary_2.txt"} <= names
    assert {"upper_laplacian.txt", "lower_laplacian.txt", "full_laplacian.txt", "degree.txt"} <= names
    # the triplets reproduce the boundary matrix
    lines = (tmp_path / "mats" / "boundary_2.txt").read_text().splitlines()
    rows, cols, nnz = map(int, lines[0].split())
    B = boundary_matrix(M, 2)
    assert (rows, cols, nnz) == (B.shape[0], B.shape[1], B.nnz)
    rebuilt = np.zeros((rows, cols), dtype=np.int64)
    for line in lines[1:]:
        r, c, v = line.split()
        rebuilt[int(r), int(c)] = int(v)
    assert np.array_equal(rebuilt, B.toarray())


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def test_cli_analyze_mobius(capsys):
    code, out = run_cli(["analyze", "--generate", "mobius"], capsys)
    assert code == 0
    assert "h_exact: 5/4" in out
    assert "cheeger_inequality: ok" in out
    assert "betti: 0 0 1 0" in out


def test_cli_analyze_bowtie(capsys):
    code, out = run_cli(["analyze", "--generate", "bowtie"], capsys)
    assert code == 0
    assert "spectral_gap: 3" in out
    assert "h: 0" in out
    # the minimum of the full Laplacian spectrum is 1, not the gap
    assert "gap_route_full_min: none" in out


def test_cli_analyze_complete_generate(capsys):
    code, out = run_cli(
        ["analyze", "--generate", "complete", "n=5", "d=2"], capsys
    )
    assert code == 0
    assert "spectral_gap: 5" in out
    assert "h: 5" in out


def test_cli_analyze_input_file(tmp_path, capsys):
    path = tmp_path / "c.json"
    write_complex(bowtie(), path)
    code, out = run_cli(["analyze", "--input", str(path)], capsys)
    assert code == 0
    assert "spectral_gap: 3" in out


def test_cli_analyze_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{nope")
    code = main(["analyze", "--input", str(path)])
    err = capsys.readouterr().err
    assert code == 2
    assert "line" in err


def test_cli_analyze_budget_falls_back_to_local_search(capsys):
    code, out = run_cli(
        ["analyze", "--generate", "mobius", "--budget", "3"], capsys
    )
    assert code == 0
    assert "h_method: local-search" in out


def test_cli_mixing_complete(capsys):
    code, out = run_cli(
        ["mixing", "--generate", "complete", "n=5", "d=2", "--alpha", "5"],
        capsys,
    )
    assert code == 0
    assert "violations[alpha=5]: 0" in out
    assert "violations: 0" in out


def test_cli_mixing_rejects_incomplete_skeleton(capsys):
    code = main(["mixing", "--generate", "bowtie"])
    err = capsys.readouterr().err
    assert code == 2
    assert "complete skeleton" in err


def test_cli_mixing_alpha_auto(capsys):
    code, out = run_cli(["mixing", "--generate", "mobius"], capsys)
    assert code == 0
    assert "rho[alpha=2.5]: 2.5" in out


def test_cli_random(capsys):
    code, out = run_cli(
        [
            "random",
            "--generate", "lm", "n=10", "d=2", "C=4",
            "--trials", "3",
        ],
        capsys,
    )
    assert code == 0
    assert "trials: 3" in out
    assert "[table trials]" in out


def test_cli_random_invalid_p(capsys):
    code = main(
        ["random", "--generate", "lm", "n=10", "d=2", "C=20", "--trials", "1"]
    )
    err = capsys.readouterr().err
    assert code == 2
    assert "p=2" in err


def test_cli_random_zero_trials(capsys):
    code, out = run_cli(
        ["random", "--generate", "lm", "n=10", "d=2", "C=4", "--trials", "0"],
        capsys,
    )
    assert code == 0
    assert "gamma_hat: none" in out


def test_cli_overlap_placement(tmp_path, capsys):
    path = tmp_path / "c.json"
    write_complex(complete_complex(3, 2), path)
    pl = tmp_path / "pl.txt"
    pl.write_text("0 0.0 0.0\n1 1.0 0.0\n2 0.0 1.0\n")
    code, out = run_cli(
        ["overlap", "--input", str(path), "--placement", str(pl), "--verbose"],
        capsys,
    )
    assert code == 0
    assert "fraction: 1" in out
    assert "[table containment]" in out


def test_cli_overlap_search_with_cd(capsys):
    code, out = run_cli(
        [
            "overlap",
            "--generate", "complete", "n=5", "d=2",
            "--cd", "0.3",
            "--iterations", "5",
        ],
        capsys,
    )
    assert code == 0
    assert "spectral_lower_bound:" in out
    assert "vacuous: false" in out


def test_cli_overlap_missing_cd_is_fine_without_bound(capsys):
    code, out = run_cli(
        ["overlap", "--generate", "bowtie", "--iterations", "3"], capsys
    )
    assert code == 0
    assert "spectral_lower_bound" not in out


def test_cli_overlap_cd_on_incomplete_skeleton_errors(capsys):
    code = main(
        ["overlap", "--generate", "bowtie", "--cd", "0.5", "--iterations", "2"]
    )
    assert code == 2


def test_cli_requires_one_input(capsys):
    code = main(["analyze"])
    assert code == 2
    code = main(
        ["analyze", "--input", "x.json", "--generate", "mobius"]
    )
    assert code == 2


def test_cli_output_and_figures(tmp_path, capsys):
    out_path = tmp_path / "report.txt"
    code = main(
        ["analyze", "--generate", "mobius", "--output", str(out_path)]
    )
    assert code == 0
    text = out_path.read_text()
    assert "h_exact: 5/4" in text
    figure = tmp_path / "report_spectrum.png"
    assert figure.exists() and figure.stat().st_size > 0


def test_cli_no_figures_flag(tmp_path):
    out_path = tmp_path / "report.txt"
    code = main(
        [
            "analyze",
            "--generate", "mobius",
            "--output", str(out_path),
            "--no-figures",
        ]
    )
    assert code == 0
    assert not (tmp_path / "report_spectrum.png").exists()


def test_cli_dump_matrices_flag(tmp_path):
    out_dir = tmp_path / "mats"
    code = main(
        [
            "analyze",
            "--generate", "mobius",
            "--dump-matrices", str(out_dir),
            "--output", str(tmp_path / "r.txt"),
            "--no-figures",
        ]
    )
    assert code == 0
    assert (out_dir / "boundary_2.txt").exists()


DETERMINISM_COMMANDS = [
    ["analyze", "--generate", "mobius", "--alpha", "k"],
    ["analyze", "--generate", "lm", "n=9", "d=2", "p=0.4"],
    ["mixing", "--generate", "complete", "n=5", "d=2", "--alpha", "k", "--alpha", "auto"],
    ["random", "--generate", "lm", "n=9", "d=2", "C=4", "--trials", "3"],
    ["overlap", "--generate", "bowtie", "--iterations", "4"],
]


@pytest.mark.parametrize("command", DETERMINISM_COMMANDS, ids=lambda c: c[0])
def test_cli_byte_determinism(command, tmp_path):
    outputs = []
    for run in ("a", "b"):
        directory = tmp_path / run
        directory.mkdir()
        out_path = directory / "report.txt"
        code = main(command + ["--output", str(out_path)])
        assert code == 0
        blob = out_path.read_bytes()
        for figure in sorted(directory.glob("*.png")):
            blob += figure.read_bytes()
        outputs.append(blob)
    assert outputs[0] == outputs[1]
