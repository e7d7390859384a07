"""Grid estimates of the rho, beta and phi mixing coefficients.

Everything here works on a :class:`TransitionMatrix`.  For an n-cell grid the
estimates are the exact coefficients between the cell sigma-algebras of the
discretized chain; they are lower bounds for the continuous-state values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .copula import Copula, HoeffdingM, HoeffdingW, Frechet, Mixture
from .errors import InvalidEnvelopeError, InvalidParameterError, NumericFailure
from .transition import TransitionMatrix, discretize, matrix_power

SVD_MAX_N = 400
POWER_TOL = 1e-10
POWER_MAX_ITER = 100_000
AUDIT_SLACK = 1e-8


def _lag_matrix(Q: TransitionMatrix, k: int) -> np.ndarray:
    if k < 1:
        raise InvalidParameterError("lag must be >= 1")
    return matrix_power(Q, k).entries


def _deflate(P: np.ndarray) -> np.ndarray:
    # a doubly stochastic matrix splits as J/n + A with A 1 = 0 and 1' A = 0
    return P - 1.0 / P.shape[0]


def top_singular_value(A: np.ndarray, tol: float = POWER_TOL,
                       max_iter: int = POWER_MAX_ITER, seed: int = 0) -> float:
    """Largest singular value of A by power iteration on A'A."""
    n = A.shape[1]
    x = np.random.default_rng(seed).standard_normal(n)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = A.T @ (A @ x)
        lam_new = float(x @ y)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x_new = y / norm
        if abs(lam_new - lam) <= tol * max(lam_new, 1e-300):
            return float(np.sqrt(max(lam_new, 0.0)))
        x, lam = x_new, lam_new
    residual = float(np.linalg.norm(A.T @ (A @ x) - lam * x))
    raise NumericFailure(f"power iteration did not converge in {max_iter} steps", residual)


def rho_n(Q: TransitionMatrix, k: int = 1) -> float:
    """Second singular value of Q^k, i.e. the maximal correlation at lag k."""
    A = _deflate(_lag_matrix(Q, k))
    if A.shape[0] <= SVD_MAX_N:
        s = float(np.linalg.svd(A, compute_uv=False)[0])
    else:
        s = top_singular_value(A)
    if s <= 1.0 + 1e-9:
        s = min(s, 1.0)
    return max(s, 0.0)


def beta_n(Q: TransitionMatrix, k: int = 1) -> float:
    P = _lag_matrix(Q, k)
    n = P.shape[0]
    return float(np.abs(n * P - 1.0).sum() / (2.0 * n * n))


def phi_n(Q: TransitionMatrix, k: int = 1) -> float:
    P = _lag_matrix(Q, k)
    n = P.shape[0]
    return float(np.abs(n * P - 1.0).sum(axis=1).max() / (2.0 * n))


def theorem2_bound(int_eps1: float, int_eps2: float) -> float:
    """Upper bound ``1 - (int eps1 + int eps2) / 2`` on rho_1.

    Valid whenever the AC density satisfies ``c(x, y) >= eps1(x) + eps2(y)``;
    the caller supplies the integrals of the two envelope functions.
    """
    if int_eps1 < 0.0 or int_eps2 < 0.0:
        raise InvalidEnvelopeError("envelope integrals must be nonnegative")
    if int_eps1 + int_eps2 > 2.0:
        raise InvalidEnvelopeError(
            f"envelope integrals sum to {int_eps1 + int_eps2} > 2; not a sub-density"
        )
    return 1.0 - 0.5 * (int_eps1 + int_eps2)


def envelope_bound(grid: Sequence[float], eps1: Sequence[float], eps2: Sequence[float],
                   copula: Copula | None = None) -> float:
    """Bound from tabulated envelopes ``eps1(grid)``, ``eps2(grid)``.

    Integrals use the trapezoid rule.  If ``copula`` is given, the envelope
    condition is checked on the tensor grid before the bound is returned.
    """
    x = np.asarray(grid, dtype=float)
    e1 = np.asarray(eps1, dtype=float)
    e2 = np.asarray(eps2, dtype=float)
    if np.any(e1 < 0.0) or np.any(e2 < 0.0):
        raise InvalidEnvelopeError("envelope functions must be nonnegative")
    if copula is not None:
        X, Y = np.meshgrid(x, x, indexing="ij")
        gap = copula.ac_density(X, Y) - (e1[:, None] + e2[None, :])
        if gap.min() < -1e-12:
            raise InvalidEnvelopeError(
                f"envelope exceeds the AC density by {-gap.min():.3e} on the grid"
            )
    return theorem2_bound(float(np.trapezoid(e1, x)), float(np.trapezoid(e2, x)))


def extract_constant_minorant(copula: Copula, grid_n: int) -> tuple[float, float]:
    """Grid minimum eps of the AC density and the bound ``1 - eps/2``.

    The density is sampled at the cell midpoints ``(i + 1/2)/grid_n``; the
    envelope is split evenly, ``eps1 = eps2 = eps/2``.  The minimum is an
    estimate of the essential infimum, not a proof of it.
    """
    if grid_n < 2:
        raise InvalidParameterError("grid_n must be >= 2")
    t = (np.arange(grid_n) + 0.5) / grid_n
    U, V = np.meshgrid(t, t, indexing="ij")
    eps = float(max(np.min(copula.ac_density(U, V)), 0.0))
    eps = min(eps, 2.0)
    return eps, theorem2_bound(eps / 2.0, eps / 2.0)


@dataclass(frozen=True)
class AuditEntry:
    lag: int
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs + AUDIT_SLACK

    def to_dict(self):
        return {"lag": int(self.lag), "lhs": float(self.lhs), "rhs": float(self.rhs),
                "margin": float(self.margin), "ok": bool(self.ok)}


@dataclass(frozen=True)
class Audit:
    beta_le_phi: list[AuditEntry]
    rho_le_2sqrtphi: list[AuditEntry]
    rho_submult: list[AuditEntry]

    @property
    def passed(self) -> bool:
        return all(e.ok for group in (self.beta_le_phi, self.rho_le_2sqrtphi, self.rho_submult)
                   for e in group)

    def to_dict(self):
        return {
            "beta_le_phi": [e.to_dict() for e in self.beta_le_phi],
            "rho_le_2sqrtphi": [e.to_dict() for e in self.rho_le_2sqrtphi],
            "rho_submult": [e.to_dict() for e in self.rho_submult],
        }


def _audit_from_values(lags, rho, beta, phi, rho1) -> Audit:
    return Audit(
        beta_le_phi=[AuditEntry(k, b, p) for k, b, p in zip(lags, beta, phi)],
        rho_le_2sqrtphi=[AuditEntry(k, r, 2.0 * float(np.sqrt(p))) for k, r, p in zip(lags, rho, phi)],
        rho_submult=[AuditEntry(k, r, rho1**k) for k, r in zip(lags, rho)],
    )


def inequality_audit(Q: TransitionMatrix, max_lag: int) -> Audit:
    """Check beta <= phi, rho <= 2 sqrt(phi) and rho_k <= rho_1^k for k <= max_lag."""
    if max_lag < 1:
        raise InvalidParameterError("max_lag must be >= 1")
    lags = list(range(1, max_lag + 1))
    rho = [rho_n(Q, k) for k in lags]
    beta = [beta_n(Q, k) for k in lags]
    phi = [phi_n(Q, k) for k in lags]
    return _audit_from_values(lags, rho, beta, phi, rho[0])


def _has_singular_part(copula: Copula | None) -> bool:
    if copula is None:
        return False
    if isinstance(copula, (HoeffdingM, HoeffdingW)):
        return True
    if isinstance(copula, Frechet):
        return copula.a > 0.0 or copula.b > 0.0
    if isinstance(copula, Mixture):
        return any(_has_singular_part(c) for c in copula.components)
    return False


@dataclass
class MixingReport:
    grid_n: int
    lags: list[int]
    rho: list[float]
    beta: list[float]
    phi: list[float]
    rho1: float
    rho1_bound: float | None = None
    min_density: float | None = None
    singular: bool = False
    audit: Audit = field(init=False)

    def __post_init__(self):
        self.audit = _audit_from_values(self.lags, self.rho, self.beta, self.phi, self.rho1)

    def to_dict(self) -> dict:
        return {
            "grid_n": self.grid_n,
            "lags": list(self.lags),
            "rho": list(self.rho),
            "beta": list(self.beta),
            "phi": list(self.phi),
            "rho1_bound": self.rho1_bound,
            "min_density": self.min_density,
            "audit": self.audit.to_dict(),
            "beta_phi_estimate": (
                "grid sigma-algebra estimate" if self.singular else "grid lower bound"
            ),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def mixing_report(Q: TransitionMatrix, lags: Sequence[int],
                  copula: Copula | None = None) -> MixingReport:
    """rho/beta/phi per lag, the constant-minorant certificate, and the audit."""
    lags = sorted(set(int(k) for k in lags))
    if not lags or lags[0] < 1:
        raise InvalidParameterError("lags must be a nonempty list of positive integers")
    rho = [rho_n(Q, k) for k in lags]
    beta = [beta_n(Q, k) for k in lags]
    phi = [phi_n(Q, k) for k in lags]
    rho1 = rho[0] if lags[0] == 1 else rho_n(Q, 1)
    bound = eps = None
    if copula is not None:
        eps, bound = extract_constant_minorant(copula, Q.n)
    return MixingReport(Q.n, lags, rho, beta, phi, rho1, bound, eps,
                        singular=_has_singular_part(copula))


def copula_report(copula: Copula, grid_n: int, lags: Sequence[int]) -> MixingReport:
    return mixing_report(discretize(copula, grid_n), lags, copula)
