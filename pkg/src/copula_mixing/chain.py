"""Simulation of stationary copula chains and empirical dependence checks."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .copula import Copula
from .errors import DegenerateFunctionError, InvalidParameterError

RNG_ALGORITHM = "numpy.Philox"


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator used for every simulated path."""
    return np.random.Generator(np.random.Philox(seed))


def sample_next(copula: Copula, x: float, u: float) -> float:
    """Generalized inverse ``inf{v : C_{,1}(x, v) >= u}`` of the transition CDF.

    Atoms are resolved first: a draw that lands inside the jump of an atom
    returns the atom location exactly.  Between atoms the AC part is inverted
    by the copula's own ``ac_conditional_ppf`` (closed form or bisection).
    """
    if not 0.0 < x < 1.0:
        raise InvalidParameterError(f"state must lie in (0, 1), got {x}")
    u = min(max(float(u), 0.0), 1.0)
    below = 0.0
    for loc, mass in copula.atoms(x):
        ac_at_loc = float(copula.ac_conditional_cdf(x, loc))
        # strict: a draw equal to the left limit still lands on the atom
        if u < ac_at_loc + below:
            break
        if u <= ac_at_loc + below + mass:
            return loc
        below += mass
    return copula.ac_conditional_ppf(x, u - below)


@dataclass(frozen=True)
class PathSample:
    states: np.ndarray
    seed: int
    copula_spec: str
    rng_algorithm: str = RNG_ALGORITHM

    @property
    def steps(self) -> int:
        return len(self.states) - 1

    def header(self) -> str:
        return f"# copula={self.copula_spec} seed={self.seed} steps={self.steps}"

    def to_csv(self, path: str | Path | None = None) -> str:
        body = "\n".join(repr(float(s)) for s in self.states)
        text = f"{self.header()}\n{body}\n"
        if path is not None:
            Path(path).write_text(text)
        return text


def sample_path(copula: Copula, x0: float, steps: int, seed: int) -> PathSample:
    if steps < 1:
        raise InvalidParameterError("steps must be >= 1")
    if not 0.0 < x0 < 1.0:
        raise InvalidParameterError(f"x0 must lie in (0, 1), got {x0}")
    draws = make_rng(seed).random(steps)
    states = np.empty(steps + 1)
    states[0] = x = float(x0)
    for i, u in enumerate(draws.tolist(), start=1):
        x = sample_next(copula, x, u)
        # the generalized inverse can hit 0 or 1 exactly; keep the chain interior
        if x <= 0.0 or x >= 1.0:
            x = min(max(x, 1e-12), 1.0 - 1e-12)
        states[i] = x
    return PathSample(states, seed, copula.spec)


# Test functions: orthonormal shifted Legendre polynomials and centered indicators.
TEST_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "P1": lambda x: np.sqrt(3.0) * (2.0 * x - 1.0),
    "P2": lambda x: np.sqrt(5.0) * (6.0 * x**2 - 6.0 * x + 1.0),
    "P3": lambda x: np.sqrt(7.0) * (20.0 * x**3 - 30.0 * x**2 + 12.0 * x - 1.0),
    "ind0.25": lambda x: (x <= 0.25) - 0.25,
    "ind0.5": lambda x: (x <= 0.5) - 0.5,
    "ind0.75": lambda x: (x <= 0.75) - 0.75,
}


def empirical_corr(path: PathSample | np.ndarray, lag: int, f_id: str, g_id: str) -> float:
    """Sample correlation of ``f(X_i)`` and ``g(X_{i+lag})``."""
    states = np.asarray(path.states if isinstance(path, PathSample) else path, dtype=float)
    if lag < 1 or lag >= len(states) / 10:
        raise InvalidParameterError(f"lag must be in [1, N/10), got {lag}")
    try:
        f, g = TEST_FUNCTIONS[f_id], TEST_FUNCTIONS[g_id]
    except KeyError as exc:
        raise InvalidParameterError(f"unknown test function {exc.args[0]!r}") from None
    a = np.asarray(f(states[:-lag]), dtype=float)
    b = np.asarray(g(states[lag:]), dtype=float)
    sa, sb = a.std(), b.std()
    tiny = 1e-12
    if sa <= tiny or sb <= tiny:
        raise DegenerateFunctionError(
            f"zero sample variance for {f_id if sa <= tiny else g_id} at lag {lag}"
        )
    return float(np.mean((a - a.mean()) * (b - b.mean())) / (sa * sb))


def correlation_table(path: PathSample, lag: int) -> dict[str, float]:
    """``empirical_corr`` for every ordered pair in the dictionary."""
    return {
        f"{f}|{g}": empirical_corr(path, lag, f, g)
        for f in TEST_FUNCTIONS for g in TEST_FUNCTIONS
    }
