"""Adjacency matrices that define the topology of a cluster state.

Generators emit 0/1 weights, but :class:`AdjacencyMatrix` accepts any real
symmetric matrix with zero diagonal (weighted graphs).  Node indices are
0-based in code; text files and CSV output follow the 1-based convention.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ShapeError

GRAPH_KINDS = ("linear", "rectangular", "complete")


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Real N x N weight matrix of a graph.

    Construction only checks that the matrix is square and finite, so that
    malformed inputs can still be handed to :func:`validate_adjacency`.
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ShapeError(f"adjacency matrix must be square, got shape {entries.shape}")
        if entries.shape[0] == 0:
            raise ShapeError("adjacency matrix must have at least one node")
        if not np.all(np.isfinite(entries)):
            raise ShapeError("adjacency matrix has non-finite entries")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def edges(self) -> list[tuple[int, int]]:
        """Nonzero upper-triangle pairs (0-based)."""
        rows, cols = np.nonzero(np.triu(self.entries, k=1))
        return list(zip(rows.tolist(), cols.tolist()))

    def permuted(self, perm) -> "AdjacencyMatrix":
        """Relabel nodes: returns ``P A P^T`` for the permutation matrix of ``perm``."""
        p = np.eye(self.n)[list(perm)]
        return AdjacencyMatrix(p @ self.entries @ p.T)

    def __eq__(self, other):
        if not isinstance(other, AdjacencyMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )

    def __hash__(self):
        return hash(self.entries.tobytes())


@dataclass(frozen=True)
class AdjacencyReport:
    symmetry_residual: float
    max_diagonal: float
    finite: bool
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.finite
            and self.symmetry_residual <= self.tol
            and self.max_diagonal <= self.tol
        )


def as_adjacency(a: Union[AdjacencyMatrix, np.ndarray]) -> AdjacencyMatrix:
    return a if isinstance(a, AdjacencyMatrix) else AdjacencyMatrix(a)


def make_graph(kind: str, n: int) -> AdjacencyMatrix:
    """Build a 0/1 adjacency matrix.

    Parameters
    ----------
    kind : {"linear", "rectangular", "complete"}
        ``linear`` is the path ``1-2-...-n``; ``rectangular`` is the
        2 x (n/2) ladder with nodes numbered row by row; ``complete`` connects
        every pair.
    n : int
        Number of nodes.
    """
    if kind not in GRAPH_KINDS:
        raise ShapeError(f"unknown graph kind {kind!r}; expected one of {GRAPH_KINDS}")
    if int(n) != n or n < 1:
        raise ShapeError(f"graph needs a positive integer node count, got {n!r}")
    n = int(n)
    a = np.zeros((n, n))
    if kind == "linear":
        idx = np.arange(n - 1)
        a[idx, idx + 1] = 1.0
    elif kind == "complete":
        a[:] = 1.0
        np.fill_diagonal(a, 0.0)
    else:
        if n % 2 or n < 4:
            raise ShapeError(f"rectangular graph needs an even n >= 4, got {n}")
        cols = n // 2
        for row in range(2):
            for col in range(cols - 1):
                j = row * cols + col
                a[j, j + 1] = 1.0
        for col in range(cols):
            a[col, cols + col] = 1.0
    a = np.maximum(a, a.T)
    return AdjacencyMatrix(a)


def validate_adjacency(a: Union[AdjacencyMatrix, np.ndarray], tol: float = 0.0) -> AdjacencyReport:
    entries = np.asarray(a.entries if isinstance(a, AdjacencyMatrix) else a, dtype=float)
    finite = bool(np.all(np.isfinite(entries)))
    if entries.size == 0:
        return AdjacencyReport(0.0, 0.0, finite, tol)
    with np.errstate(invalid="ignore"):
        sym = float(np.max(np.abs(entries - entries.T)))
        diag = float(np.max(np.abs(np.diag(entries))))
    return AdjacencyReport(sym, diag, finite, tol)


def require_valid(a: Union[AdjacencyMatrix, np.ndarray], tol: float = 1e-12) -> AdjacencyMatrix:
    a = as_adjacency(a)
    report = validate_adjacency(a, tol)
    if not report.passed:
        raise ShapeError(
            "adjacency matrix must be symmetric with zero diagonal "
            f"(asymmetry {report.symmetry_residual:.3g}, diagonal {report.max_diagonal:.3g})"
        )
    return a


def read_adjacency(source) -> AdjacencyMatrix:
    """Read the plain-text format: first line ``n``, then ``n`` rows of ``n`` reals."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ShapeError("empty adjacency file")
    try:
        n = int(lines[0])
        rows = [[float(v) for v in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise ShapeError(f"malformed adjacency file: {exc}") from None
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ShapeError(f"adjacency file declares n={n} but rows do not form an {n}x{n} matrix")
    return AdjacencyMatrix(np.array(rows))


def write_adjacency(a: AdjacencyMatrix, dest=None) -> str:
    buf = io.StringIO()
    buf.write(f"{a.n}\n")
    for row in a.entries:
        buf.write(" ".join(format(v, ".17g") for v in row) + "\n")
    text = buf.getvalue()
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(text)
    elif dest is not None:
        dest.write(text)
    return text
