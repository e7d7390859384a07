"""Metropolis-Hastings chains viewed as copula chains.

A target density f on a bounded interval and a proposal q induce a
reversible chain.  Mapping states through the target CDF F gives a copula
whose AC density is

    c(u, v) = q(x, y) alpha(x, y) / f(y),   x = F^-1(u), y = F^-1(v),

and whose singular part is the rejection mass on the diagonal.  The module
evaluates both parts, builds the discretized transition matrix and derives
rho_1 certificates from lower bounds ``q >= a f``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import integrate, special

from .chain import make_rng
from .errors import ConfigurationError, DegeneratePointError, NumericFailure, SpecParseError
from .metrics import theorem2_bound
from .transition import TransitionMatrix

log = logging.getLogger(__name__)

TABLE_NODES = 4096
CERT_AXIS_POINTS = 512
SIMPSON_NODES = 2001
EDGE = 1e-12


@dataclass(frozen=True, eq=False)
class MarginalModel:
    """Target density on ``[lo, hi]`` with tabulated CDF and quantile.

    The CDF is the exact integral of the piecewise-linear interpolant of the
    pdf on ``m`` uniform cells, so the table and the interpolated ``cdf``
    agree and ``ppf`` inverts ``cdf`` to round-off.
    """

    pdf_fn: Callable
    lo: float
    hi: float
    m: int = TABLE_NODES
    name: str = "custom"
    norm: float = field(init=False)
    x_nodes: np.ndarray = field(init=False, repr=False)
    pdf_nodes: np.ndarray = field(init=False, repr=False)
    cdf_table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ConfigurationError(f"target domain must be a bounded interval, got [{self.lo}, {self.hi}]")
        x = np.linspace(self.lo, self.hi, self.m + 1)
        p = np.asarray(self.pdf_fn(x), dtype=float)
        if np.any(~np.isfinite(p)) or np.any(p < 0.0):
            raise ConfigurationError("target pdf must be finite and nonnegative on the domain")
        z = float(np.trapezoid(p, x))
        if z <= 0.0:
            raise ConfigurationError("target pdf integrates to zero")
        norm = 1.0
        if abs(z - 1.0) > 1e-6:
            log.info("renormalizing target %s by factor %.9g", self.name, 1.0 / z)
            norm = z
        # the table itself is always exactly normalized
        p = p / z
        h = x[1] - x[0]
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * h * (p[1:] + p[:-1]))])
        cdf /= cdf[-1]
        for name, val in (("norm", norm), ("x_nodes", x), ("pdf_nodes", p), ("cdf_table", cdf)):
            if isinstance(val, np.ndarray):
                val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / self.m

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lo) & (x <= self.hi)
        val = np.asarray(self.pdf_fn(np.clip(x, self.lo, self.hi)), dtype=float) / self.norm
        return np.where(inside, val, 0.0)

    def _cell_cdf(self, i, x):
        t = x - self.x_nodes[i]
        p0, p1 = self.pdf_nodes[i], self.pdf_nodes[i + 1]
        return self.cdf_table[i] + p0 * t + (p1 - p0) * t * t / (2.0 * self.h)

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), self.lo, self.hi)
        i = np.clip(((x - self.lo) / self.h).astype(int), 0, self.m - 1)
        return np.clip(self._cell_cdf(i, x), 0.0, 1.0)

    def ppf(self, u):
        """Quantile: table lookup for the cell, then bisection inside it."""
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        i = np.clip(np.searchsorted(self.cdf_table, u, side="left") - 1, 0, self.m - 1)
        lo = self.x_nodes[i].copy() if np.ndim(i) else float(self.x_nodes[i])
        hi = lo + self.h
        for _ in range(52):
            mid = 0.5 * (lo + hi)
            below = self._cell_cdf(i, mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = np.clip(0.5 * (lo + hi), self.lo, self.hi)
        return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class IndependentProposal:
    """Proposal q(y) that ignores the current state."""

    density: Callable
    sampler: Callable[[np.random.Generator], float]
    name: str = "indep"
    kind = "Independent"

    def kernel(self, x, y):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.density(y), dtype=float),
                               np.broadcast(x, np.asarray(y)).shape)

    def sample(self, x: float, rng: np.random.Generator) -> float:
        return self.sampler(rng)


@dataclass(frozen=True, eq=False)
class GeneralProposal:
    """Proposal kernel q(x, y), a density in y for each x."""

    kernel_fn: Callable
    sampler: Callable[[float, np.random.Generator], float]
    name: str = "general"
    kind = "General"

    def kernel(self, x, y):
        return np.asarray(self.kernel_fn(np.asarray(x, dtype=float), np.asarray(y, dtype=float)),
                          dtype=float)

    def sample(self, x: float, rng: np.random.Generator) -> float:
        return self.sampler(x, rng)


Proposal = IndependentProposal | GeneralProposal


def _axis(lo: float, hi: float, points: int = CERT_AXIS_POINTS) -> np.ndarray:
    """``points`` uniform nodes plus the midpoints between them."""
    return np.linspace(lo, hi, 2 * points - 1)


@dataclass(frozen=True, eq=False)
class MhModel:
    target: MarginalModel
    proposal: Proposal
    check_nodes: int = 100_001

    def __post_init__(self):
        t = self.target
        y = np.linspace(t.lo, t.hi, self.check_nodes)
        for x in np.linspace(t.lo, t.hi, 11):
            q = self.proposal.kernel(x, y)
            if np.any(~np.isfinite(q)) or np.any(q < 0.0):
                raise ConfigurationError(f"proposal density invalid at x={x}")
            mass = float(np.trapezoid(q, y))
            if abs(mass - 1.0) > 1e-4:
                raise ConfigurationError(
                    f"proposal integrates to {mass:.6f} over the target domain at x={x}"
                )

    @cached_property
    def _grid(self):
        g = _axis(self.target.lo, self.target.hi)
        return g, self.target.pdf(g)

    @cached_property
    def a_min(self) -> float:
        """Grid infimum of q/f (over y, and over x for general proposals)."""
        g, f = self._grid
        pos = f > 0.0
        if self.proposal.kind == "Independent":
            ratio = self.proposal.kernel(g[pos], g[pos]) / f[pos]
        else:
            X, Y = np.meshgrid(g, g[pos], indexing="ij")
            ratio = self.proposal.kernel(X, Y) / f[pos][None, :]
        return float(max(np.min(ratio), 0.0))

    @cached_property
    def k_sup(self) -> float:
        g, _ = self._grid
        if self.proposal.kind == "Independent":
            q = self.proposal.kernel(g, g)
        else:
            X, Y = np.meshgrid(g, g, indexing="ij")
            q = self.proposal.kernel(X, Y)
        return float(np.max(q)) if np.all(np.isfinite(q)) else math.inf


def acceptance(model: MhModel, x, y):
    """``min{f(y) q(y, x) / (f(x) q(x, y)), 1}``."""
    f = model.target.pdf
    q = model.proposal.kernel
    fx = np.asarray(f(x), dtype=float)
    qxy = np.asarray(q(x, y), dtype=float)
    if np.any(fx == 0.0):
        raise DegeneratePointError("acceptance ratio undefined: f(x) = 0")
    if np.any(qxy == 0.0):
        raise DegeneratePointError("acceptance ratio undefined: q(x, y) = 0")
    ratio = np.asarray(f(y), dtype=float) * np.asarray(q(y, x), dtype=float) / (fx * qxy)
    out = np.minimum(ratio, 1.0)
    return out if out.ndim else float(out)


def mh_copula_ac_density(model: MhModel, u, v):
    """AC density of the MH copula at (u, v).

    Evaluated as ``min{q(y, x)/f(x), q(x, y)/f(y)}``, which equals
    ``q(x, y) alpha(x, y) / f(y)`` and is symmetric in (u, v) by construction.
    """
    u = np.clip(np.asarray(u, dtype=float), EDGE, 1.0 - EDGE)
    v = np.clip(np.asarray(v, dtype=float), EDGE, 1.0 - EDGE)
    x = np.asarray(model.target.ppf(u))
    y = np.asarray(model.target.ppf(v))
    fx = model.target.pdf(x)
    fy = model.target.pdf(y)
    q = model.proposal.kernel
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(fx > 0.0, q(y, x) / fx, np.inf)
        t2 = np.where(fy > 0.0, q(x, y) / fy, np.inf)
    c = np.minimum(t1, t2)
    if np.any(np.isinf(c)):
        raise DegeneratePointError("MH copula density undefined: f vanishes at both F^-1(u) and F^-1(v)")
    return c if c.ndim else float(c)


def _simpson_nodes(m: int) -> int:
    return m if m % 2 else m + 1


def mh_rejection_mass(model: MhModel, u: float, m: int = SIMPSON_NODES) -> float:
    """Probability that the chain at ``F^-1(u)`` rejects and holds its state."""
    z = np.linspace(0.0, 1.0, _simpson_nodes(m))
    accepted = float(integrate.simpson(mh_copula_ac_density(model, u, z), x=z))
    mass = 1.0 - accepted
    if not -1e-6 <= mass <= 1.0 + 1e-6:
        raise NumericFailure(f"rejection mass {mass} outside [0, 1]", residual=mass)
    return min(max(mass, 0.0), 1.0)


@dataclass(frozen=True)
class Certificate:
    a: float
    k: float
    rho1_bound: float
    certified: bool
    axis_points: int
    reason: str = ""
    f_bounded_below: bool = False

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "k": self.k if math.isfinite(self.k) else None,
            "rho1_bound": self.rho1_bound,
            "certified": self.certified,
            "grid": {"axis_points": self.axis_points},
            "reason": self.reason,
            "f_bounded_below": self.f_bounded_below,
        }


def _eps2_integral(model: MhModel, eps2_of_x: Callable[[np.ndarray], np.ndarray]) -> float:
    # int_0^1 eps2(F^-1(v)) dv = int eps2(x) f(x) dx
    t = model.target
    x = np.linspace(t.lo, t.hi, _simpson_nodes(SIMPSON_NODES * 2))
    return float(integrate.simpson(eps2_of_x(x) * t.pdf(x), x=x))


def _f_bounded_below(model: MhModel) -> bool:
    _, f = model._grid
    return bool(np.min(f) > 0.0)


def certify_independent(model: MhModel) -> Certificate:
    """Bound from ``q(y) >= a f(y)`` for an independent proposal."""
    if model.proposal.kind != "Independent":
        raise ConfigurationError("certify_independent needs an independent proposal")
    a, k = model.a_min, model.k_sup
    if a <= 1e-12:
        return Certificate(0.0, k, 1.0, False, CERT_AXIS_POINTS, "no minorization",
                           _f_bounded_below(model))

    def eps2(x):
        f = model.target.pdf(x)
        q = np.asarray(model.proposal.density(x), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(q > 0.0, a * f / q, 1.0)
        return a * np.minimum(r, 1.0)

    bound = theorem2_bound(0.0, _eps2_integral(model, eps2))
    return Certificate(a, k, bound, bound < 1.0, CERT_AXIS_POINTS, "", _f_bounded_below(model))


def _support_is_interval(model: MhModel) -> bool:
    g, _ = model._grid
    X, Y = np.meshgrid(g, g, indexing="ij")
    pos = model.proposal.kernel(X, Y) > 0.0
    rises = np.sum(np.diff(pos.astype(np.int8), axis=1) == 1, axis=1) + pos[:, 0]
    return bool(np.all(rises <= 1))


def certify_general(model: MhModel) -> Certificate:
    """Bound from ``q(x, y) >= a f(y)`` and ``q <= k`` for any proposal."""
    if not _support_is_interval(model):
        raise ConfigurationError("proposal support is not an interval for some x")
    a, k = model.a_min, model.k_sup
    flag = _f_bounded_below(model)
    if not math.isfinite(k):
        return Certificate(a, k, 1.0, False, CERT_AXIS_POINTS, "k infinite", flag)
    if a <= 1e-12:
        return Certificate(0.0, k, 1.0, False, CERT_AXIS_POINTS, "no minorization", flag)

    def eps2(x):
        return a * np.minimum(a * model.target.pdf(x) / k, 1.0)

    bound = theorem2_bound(0.0, _eps2_integral(model, eps2))
    return Certificate(a, k, bound, bound < 1.0, CERT_AXIS_POINTS, "", flag)


def certify(model: MhModel) -> Certificate:
    if model.proposal.kind == "Independent":
        return certify_independent(model)
    return certify_general(model)


def mh_transition_matrix(model: MhModel, n: int) -> TransitionMatrix:
    """Cell transition matrix of the MH copula.

    The AC part uses the density at cell midpoints; each row's missing mass
    (the rejection probability at the grid level) goes on the diagonal.
    """
    t = (np.arange(n) + 0.5) / n
    U, V = np.meshgrid(t, t, indexing="ij")
    Q = mh_copula_ac_density(model, U, V) / n
    worst = float(Q.sum(axis=1).max())
    if worst > 1.0:
        # a uniform rescale keeps Q symmetric, hence doubly stochastic below
        log.info("midpoint AC row mass %.6g exceeds 1; rescaling", worst)
        Q /= worst
    hold = np.maximum(1.0 - Q.sum(axis=1), 0.0)
    Q[np.diag_indices(n)] += hold
    return TransitionMatrix(Q)


@dataclass(frozen=True)
class MhPath:
    states: np.ndarray
    accepted: int
    seed: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / (len(self.states) - 1)


def mh_sample(model: MhModel, x0: float, steps: int, seed: int) -> MhPath:
    """Run the sampler: propose y ~ q(x, .), accept when a uniform draw is <= alpha."""
    t = model.target
    if not t.lo <= x0 <= t.hi or float(t.pdf(x0)) <= 0.0:
        raise ConfigurationError(f"x0={x0} must lie in the target support")
    if steps < 1:
        raise ConfigurationError("steps must be >= 1")
    rng = make_rng(seed)
    f = t.pdf
    q = model.proposal.kernel
    states = np.empty(steps + 1)
    states[0] = x = float(x0)
    fx = float(f(x))
    accepted = 0
    for i in range(1, steps + 1):
        y = float(model.proposal.sample(x, rng))
        u = rng.random()
        fy = float(f(y))
        num = fy * float(q(y, x))
        den = fx * float(q(x, y))
        if num >= den or u * den <= num:
            x, fx = y, fy
            accepted += 1
        states[i] = x
    return MhPath(states, accepted, seed)


# ---------------------------------------------------------------------------
# spec strings
# ---------------------------------------------------------------------------

def _kv(body: str, keys: set[str], name: str) -> dict[str, float]:
    out = {}
    for part in filter(None, body.split(",")):
        key, eq, val = part.partition("=")
        if not eq or key.strip() not in keys:
            raise SpecParseError(f"{name}: bad parameter {part!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise SpecParseError(f"{name}: {part!r} is not numeric") from None
    if keys - out.keys():
        raise SpecParseError(f"{name}: missing {sorted(keys - out.keys())}")
    return out


def _read_table(path: str) -> tuple[np.ndarray, np.ndarray]:
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except ValueError:
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2, skiprows=1)
    except OSError as exc:
        raise SpecParseError(f"cannot read table {path!r}: {exc}") from None
    if data.shape[1] != 2 or data.shape[0] < 2:
        raise SpecParseError(f"table {path!r} needs two columns x, density")
    order = np.argsort(data[:, 0])
    return data[order, 0], data[order, 1]


def beta_pdf(p: float, q: float) -> Callable:
    if p <= 0.0 or q <= 0.0:
        raise SpecParseError("beta parameters must be positive")
    const = 1.0 / special.beta(p, q)
    return lambda x: const * np.power(x, p - 1.0) * np.power(1.0 - x, q - 1.0)


def parse_target(spec: str, m: int = TABLE_NODES) -> MarginalModel:
    """``uniform``, ``beta:p=2,q=2``, ``truncnormal:mu=0.5,sigma=0.2`` or ``table:<csv>``."""
    name, _, body = spec.strip().partition(":")
    if name == "uniform" and not body:
        return MarginalModel(lambda x: np.ones_like(np.asarray(x, dtype=float)), 0.0, 1.0, m, spec)
    if name == "beta":
        kw = _kv(body, {"p", "q"}, name)
        if kw["p"] < 1.0 or kw["q"] < 1.0:
            raise SpecParseError("beta targets need p, q >= 1 for a bounded density")
        return MarginalModel(beta_pdf(kw["p"], kw["q"]), 0.0, 1.0, m, spec)
    if name == "truncnormal":
        kw = _kv(body, {"mu", "sigma"}, name)
        mu, sigma = kw["mu"], kw["sigma"]
        if sigma <= 0.0:
            raise SpecParseError("truncnormal sigma must be positive")
        return MarginalModel(lambda x: np.exp(-0.5 * ((x - mu) / sigma) ** 2), 0.0, 1.0, m, spec)
    if name == "table":
        xs, ps = _read_table(body)
        return MarginalModel(lambda x: np.interp(x, xs, ps), float(xs[0]), float(xs[-1]), m, spec)
    raise SpecParseError(f"unknown target spec {spec!r}")


def parse_proposal(spec: str, target: MarginalModel) -> Proposal:
    """``indep-uniform``, ``indep-table:<csv>`` or ``rw-uniform:h=0.1`` on the target domain."""
    name, _, body = spec.strip().partition(":")
    lo, hi = target.lo, target.hi
    if name == "indep-uniform" and not body:
        width = hi - lo

        def density(y):
            y = np.asarray(y, dtype=float)
            return np.where((y >= lo) & (y <= hi), 1.0 / width, 0.0)

        return IndependentProposal(density, lambda rng: lo + width * rng.random(), spec)
    if name == "indep-table":
        xs, ps = _read_table(body)
        table = MarginalModel(lambda x: np.interp(x, xs, ps), float(xs[0]), float(xs[-1]), name=spec)
        return IndependentProposal(table.pdf, lambda rng: table.ppf(rng.random()), spec)
    if name == "rw-uniform":
        h = _kv(body, {"h"}, name)["h"]
        if h <= 0.0:
            raise SpecParseError("rw-uniform step h must be positive")

        def kernel(x, y):
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            width = np.minimum(x + h, hi) - np.maximum(x - h, lo)
            inside = (np.abs(y - x) < h) & (y >= lo) & (y <= hi)
            return np.where(inside, 1.0 / width, 0.0)

        def sampler(x, rng):
            a, b = max(x - h, lo), min(x + h, hi)
            return a + (b - a) * rng.random()

        return GeneralProposal(kernel, sampler, spec)
    raise SpecParseError(f"unknown proposal spec {spec!r}")


def build_model(target_spec: str, proposal_spec: str) -> MhModel:
    target = parse_target(target_spec)
    return MhModel(target, parse_proposal(proposal_spec, target))


def write_table(path: str | Path, x, density) -> None:
    """Write a two-column ``x,density`` CSV readable by ``table:`` specs."""
    rows = "\n".join(f"{float(a)!r},{float(b)!r}" for a, b in zip(x, density))
    Path(path).write_text("x,density\n" + rows + "\n")
