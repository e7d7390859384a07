"""Cell-to-cell transition matrices of copula chains.

The unit interval is split into n cells ``((i-1)/n, i/n]``.  Entry ``Q[i, j]``
is the probability that a chain in cell i (uniformly distributed inside it)
moves to cell j.  Only CDF values enter, so singular mass is captured exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .copula import Copula
from .errors import InvalidParameterError

log = logging.getLogger(__name__)

NEG_TOL = 1e-12
RENORM_TOL = 1e-12


@dataclass(frozen=True)
class TransitionMatrix:
    entries: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.entries, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise InvalidParameterError(f"transition matrix must be square, got shape {q.shape}")
        q = q.copy()
        q.setflags(write=False)
        object.__setattr__(self, "entries", q)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def row_sum_error(self) -> float:
        return float(np.max(np.abs(self.entries.sum(axis=1) - 1.0)))

    def col_sum_error(self) -> float:
        return float(np.max(np.abs(self.entries.sum(axis=0) - 1.0)))

    def to_csv(self, path: str | Path | None = None) -> str:
        lines = [f"n={self.n}"]
        lines += [",".join(repr(float(x)) for x in row) for row in self.entries]
        text = "\n".join(lines) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, text: str) -> "TransitionMatrix":
        lines = text.strip().splitlines()
        if not lines or not lines[0].startswith("n="):
            raise InvalidParameterError("transition CSV must start with 'n=<n>'")
        n = int(lines[0][2:])
        rows = [[float(x) for x in line.split(",")] for line in lines[1:]]
        q = np.array(rows, dtype=float)
        if q.shape != (n, n):
            raise InvalidParameterError(f"expected {n}x{n} entries, got {q.shape}")
        return cls(q)


def _clean(q: np.ndarray) -> np.ndarray:
    """Clamp round-off negatives and renormalize rows that drifted."""
    worst = float(q.min())
    if worst < -NEG_TOL:
        log.warning("transition entry %.3e below -%.0e, clamping", worst, NEG_TOL)
    q = np.maximum(q, 0.0)
    rows = q.sum(axis=1)
    drift = np.abs(rows - 1.0)
    if np.any(drift > RENORM_TOL):
        log.info("renormalizing %d rows, max |row sum - 1| = %.3e",
                 int(np.sum(drift > RENORM_TOL)), float(drift.max()))
        bad = drift > RENORM_TOL
        q[bad] /= rows[bad, None]
    return q


def discretize(copula: Copula, n: int) -> TransitionMatrix:
    """Transition matrix from second differences of the copula CDF on an n-grid."""
    if n < 2:
        raise InvalidParameterError("grid size n must be >= 2")
    t = np.arange(n + 1) / n
    U, V = np.meshgrid(t, t, indexing="ij")
    C = np.asarray(copula.cdf(U, V), dtype=float)
    mass = C[1:, 1:] - C[:-1, 1:] - C[1:, :-1] + C[:-1, :-1]
    return TransitionMatrix(_clean(n * mass))


def matrix_power(Q: TransitionMatrix, k: int) -> TransitionMatrix:
    if k < 1:
        raise InvalidParameterError("power k must be >= 1")
    if k == 1:
        return Q
    return TransitionMatrix(np.maximum(np.linalg.matrix_power(Q.entries, k), 0.0))


def coarsen(Q: TransitionMatrix) -> TransitionMatrix:
    """Aggregate a 2n-grid matrix into n cells (mean over 2x2 blocks, times 2)."""
    n2 = Q.n
    if n2 % 2:
        raise InvalidParameterError("coarsen needs an even grid size")
    blocks = Q.entries.reshape(n2 // 2, 2, n2 // 2, 2).sum(axis=(1, 3))
    return TransitionMatrix(blocks / 2.0)
