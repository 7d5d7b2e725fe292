"""On-disk formats: complex files, placement files, and matrix dumps.

A complex file is a JSON document with fields ``n`` (vertex count) and
``top_cells`` (array of integer arrays, each sorted ascending); cells with
repeated vertices are rejected.  A placement file has one line per vertex:
``id x_1 ... x_d``.  Matrix dumps are coordinate-format text, one
``row col value`` triplet per line, 0-based.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .complexes import CellError, SimplicialComplex, from_top_cells
from .operators import (
    boundary_matrix,
    degree_operator,
    full_laplacian,
    lower_laplacian,
    upper_laplacian,
)


class FormatError(ValueError):
    """Malformed complex or placement file."""


def read_complex(path: str | Path) -> SimplicialComplex:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(
            f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(doc, dict) or "n" not in doc or "top_cells" not in doc:
        raise FormatError(f"{path}: expected an object with 'n' and 'top_cells'")
    n = doc["n"]
    cells = doc["top_cells"]
    if not isinstance(n, int) or n < 0:
        raise FormatError(f"{path}: 'n' must be a non-negative integer")
    if not isinstance(cells, list) or not all(isinstance(c, list) for c in cells):
        raise FormatError(f"{path}: 'top_cells' must be an array of arrays")
    for c in cells:
        if any(not isinstance(v, int) for v in c):
            raise FormatError(f"{path}: cell {c} has non-integer vertices")
        if sorted(c) != c:
            raise FormatError(f"{path}: cell {c} is not sorted ascending")
    dimension = doc.get("dimension")
    try:
        return from_top_cells(n, cells, dimension=dimension)
    except CellError as e:
        raise FormatError(f"{path}: {e}") from e


def write_complex(X: SimplicialComplex, path: str | Path) -> None:
    doc = {
        "n": X.n,
        "top_cells": [list(c) for c in X.facets() if len(c) > 1],
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def read_placement(path: str | Path, n: int, d: int) -> np.ndarray:
    points = np.full((n, d), np.nan)
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != d + 1:
            raise FormatError(
                f"{path}:{lineno}: expected 'id x_1 ... x_{d}', got {len(parts)} fields"
            )
        try:
            v = int(parts[0])
            coords = [float(x) for x in parts[1:]]
        except ValueError as e:
            raise FormatError(f"{path}:{lineno}: {e}") from e
        if not 0 <= v < n:
            raise FormatError(f"{path}:{lineno}: vertex id {v} outside 0..{n - 1}")
        points[v] = coords
    if np.isnan(points).any():
        missing = sorted(int(v) for v in np.nonzero(np.isnan(points).any(axis=1))[0])
        raise FormatError(f"{path}: missing coordinates for vertices {missing}")
    return points


def write_placement(points: np.ndarray, path: str | Path) -> None:
    lines = [
        " ".join([str(i)] + [format(float(x), ".17g") for x in row])
        for i, row in enumerate(np.asarray(points))
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def _dump_matrix(M: sp.spmatrix | np.ndarray, path: Path) -> None:
    coo = sp.coo_matrix(M)
    order = np.lexsort((coo.col, coo.row))
    lines = [f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}"]
    for i in order:
        lines.append(f"{coo.row[i]} {coo.col[i]} {int(coo.data[i])}")
    path.write_text("\n".join(lines) + "\n")


def dump_matrices(X: SimplicialComplex, directory: str | Path) -> list[Path]:
    """Write every assembled operator as coordinate-format text files."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for j in range(0, X.dimension + 1):
        p = out / f"boundary_{j}.txt"
        _dump_matrix(boundary_matrix(X, j), p)
        written.append(p)
    for name, M in [
        ("upper_laplacian", upper_laplacian(X)),
        ("lower_laplacian", lower_laplacian(X)),
        ("full_laplacian", full_laplacian(X)),
        ("degree", degree_operator(X)),
    ]:
        p = out / f"{name}.txt"
        _dump_matrix(M, p)
        written.append(p)
    return written
