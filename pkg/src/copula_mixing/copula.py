"""Bivariate copulas with an absolutely continuous part and diagonal atoms.

Every copula exposes its joint CDF, the density of its absolutely continuous
(AC) part, and the atoms of the conditional law ``V | U = u``.  The atoms are
limited to the two locations used by the Hoeffding bounds: ``v = u`` (from
``M``) and ``v = 1 - u`` (from ``W``).

All evaluation methods broadcast over numpy arrays.  Instances are immutable.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BoundaryEvaluationError, InvalidParameterError, SpecParseError

# Densities that blow up at the corners are evaluated on this clamped box.
EDGE = 1e-12
WEIGHT_TOL = 1e-12

Atom = tuple[float, float]


def _clamp(x):
    return np.clip(x, EDGE, 1.0 - EDGE)


def _check_interior(u) -> None:
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise BoundaryEvaluationError(
            "conditional CDF is only defined for 0 < u < 1"
        )


class Copula(ABC):
    """Base class.  Subclasses implement the CDF, the AC part and the atoms."""

    kind: str = "Copula"

    @property
    def params(self) -> dict:
        return {}

    @property
    def spec(self) -> str:
        """Spec string understood by :func:`parse_copula`."""
        raise NotImplementedError

    @abstractmethod
    def cdf(self, u, v):
        """Joint CDF C(u, v)."""

    @abstractmethod
    def ac_density(self, u, v):
        """Density of the absolutely continuous part on (0, 1)^2."""

    @abstractmethod
    def ac_conditional_cdf(self, u, v):
        """Integral of the AC density over [0, v] at fixed u."""

    def atoms(self, u: float) -> list[Atom]:
        """Atoms ``(location, mass)`` of the conditional law at ``u``."""
        return []

    def conditional_cdf(self, u, v):
        """Partial derivative of C in its first argument.

        This is the one-step transition CDF of the copula chain started at u.
        Atoms are added as right-continuous steps.
        """
        _check_interior(u)
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        out = np.asarray(self.ac_conditional_cdf(u, v), dtype=float)
        if u.ndim == 0:
            for loc, mass in self.atoms(float(u)):
                out = out + mass * (v >= loc)
        else:
            uu, vv = np.broadcast_arrays(u, v)
            out = np.array(np.broadcast_to(out, uu.shape), dtype=float)
            flat_u, flat_v, flat_o = uu.ravel(), vv.ravel(), out.ravel()
            for i in range(flat_u.size):
                for loc, mass in self.atoms(float(flat_u[i])):
                    flat_o[i] += mass * (flat_v[i] >= loc)
            out = flat_o.reshape(uu.shape)
        return out

    def ac_conditional_ppf(self, u: float, level: float) -> float:
        """Smallest v with ``ac_conditional_cdf(u, v) >= level``.

        Generic bisection to 1e-12 (at most 60 halvings); families with a
        closed-form inverse override this.
        """
        lo, hi = 0.0, 1.0
        for _ in range(60):
            if hi - lo <= 1e-12:
                break
            mid = 0.5 * (lo + hi)
            if float(self.ac_conditional_cdf(u, mid)) >= level:
                hi = mid
            else:
                lo = mid
        return hi

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec})"


@dataclass(frozen=True, repr=False)
class Independence(Copula):
    kind = "Independence"

    @property
    def spec(self) -> str:
        return "indep"

    def cdf(self, u, v):
        return np.asarray(u, dtype=float) * np.asarray(v, dtype=float)

    def ac_density(self, u, v):
        return np.ones(np.broadcast(np.asarray(u), np.asarray(v)).shape)

    def ac_conditional_cdf(self, u, v):
        return np.broadcast_to(
            np.asarray(v, dtype=float), np.broadcast(np.asarray(u), np.asarray(v)).shape
        ).copy()

    def ac_conditional_ppf(self, u, level):
        return min(max(level, 0.0), 1.0)


@dataclass(frozen=True, repr=False)
class HoeffdingM(Copula):
    """Upper Frechet-Hoeffding bound min(u, v): all mass on the diagonal."""

    kind = "HoeffdingM"

    @property
    def spec(self) -> str:
        return "m"

    def cdf(self, u, v):
        return np.minimum(np.asarray(u, dtype=float), np.asarray(v, dtype=float))

    def ac_density(self, u, v):
        return np.zeros(np.broadcast(np.asarray(u), np.asarray(v)).shape)

    def ac_conditional_cdf(self, u, v):
        return self.ac_density(u, v)

    def atoms(self, u):
        return [(u, 1.0)]

    def ac_conditional_ppf(self, u, level):
        return 0.0


@dataclass(frozen=True, repr=False)
class HoeffdingW(Copula):
    """Lower Frechet-Hoeffding bound max(u + v - 1, 0)."""

    kind = "HoeffdingW"

    @property
    def spec(self) -> str:
        return "w"

    def cdf(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return np.maximum(u + v - 1.0, 0.0)

    def ac_density(self, u, v):
        return np.zeros(np.broadcast(np.asarray(u), np.asarray(v)).shape)

    def ac_conditional_cdf(self, u, v):
        return self.ac_density(u, v)

    def atoms(self, u):
        return [(1.0 - u, 1.0)]

    def ac_conditional_ppf(self, u, level):
        return 0.0


@dataclass(frozen=True, repr=False)
class Clayton(Copula):
    """Clayton copula ``(u^-alpha + v^-alpha - 1)^(-1/alpha)``, alpha > 0.

    The alpha = 0 limit is the independence copula; use :class:`Independence`.
    """

    alpha: float
    kind = "Clayton"

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise InvalidParameterError(
                f"Clayton alpha must be > 0, got {self.alpha}"
            )

    @property
    def params(self):
        return {"alpha": self.alpha}

    @property
    def spec(self):
        return f"clayton:alpha={self.alpha!r}"

    def cdf(self, u, v):
        a = self.alpha
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            s = u ** (-a) + v ** (-a) - 1.0
            out = s ** (-1.0 / a)
        return np.where((u <= 0.0) | (v <= 0.0), 0.0, out)

    def ac_density(self, u, v):
        a = self.alpha
        u = _clamp(np.asarray(u, dtype=float))
        v = _clamp(np.asarray(v, dtype=float))
        s = u ** (-a) + v ** (-a) - 1.0
        log_c = (
            math.log1p(a)
            - (a + 1.0) * (np.log(u) + np.log(v))
            - (2.0 + 1.0 / a) * np.log(s)
        )
        return np.exp(log_c)

    def ac_conditional_cdf(self, u, v):
        # u^(-a-1) (u^-a + v^-a - 1)^(-1-1/a), rewritten to avoid overflow
        a = self.alpha
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            inner = 1.0 + u**a * (v ** (-a) - 1.0)
            out = inner ** (-(1.0 + a) / a)
        return np.where(v <= 0.0, 0.0, out)

    def ac_conditional_ppf(self, u, level):
        if level <= 0.0:
            return 0.0
        if level >= 1.0:
            return 1.0
        a = self.alpha
        t = level ** (-a / (1.0 + a)) - 1.0
        return (1.0 + t * u ** (-a)) ** (-1.0 / a)


@dataclass(frozen=True, repr=False)
class Frechet(Copula):
    """``a M + (1 - a - b) P + b W`` with a, b >= 0 and a + b <= 1."""

    a: float
    b: float
    kind = "Frechet"

    def __post_init__(self):
        a, b = self.a, self.b
        if not (a >= 0.0 and b >= 0.0 and a + b <= 1.0 + WEIGHT_TOL):
            raise InvalidParameterError(
                f"Frechet weights need a, b >= 0 and a + b <= 1, got a={a}, b={b}"
            )

    @property
    def params(self):
        return {"a": self.a, "b": self.b}

    @property
    def spec(self):
        return f"frechet:a={self.a!r},b={self.b!r}"

    @property
    def indep_weight(self) -> float:
        return 1.0 - self.a - self.b

    def cdf(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return (
            self.a * np.minimum(u, v)
            + self.indep_weight * u * v
            + self.b * np.maximum(u + v - 1.0, 0.0)
        )

    def ac_density(self, u, v):
        shape = np.broadcast(np.asarray(u), np.asarray(v)).shape
        return np.full(shape, self.indep_weight)

    def ac_conditional_cdf(self, u, v):
        shape = np.broadcast(np.asarray(u), np.asarray(v)).shape
        return np.broadcast_to(self.indep_weight * np.asarray(v, dtype=float), shape).copy()

    def atoms(self, u):
        return _merge_atoms([(u, self.a), (1.0 - u, self.b)])

    def ac_conditional_ppf(self, u, level):
        lam = self.indep_weight
        if lam <= 0.0:
            return 0.0
        return min(max(level / lam, 0.0), 1.0)


@dataclass(frozen=True, repr=False)
class Mardia(Frechet):
    """Mardia family: a Frechet copula with a = t^2(1+t)/2, b = t^2(1-t)/2."""

    theta: float = 0.0
    kind = "Mardia"

    def __init__(self, theta: float):
        if not (-1.0 <= theta <= 1.0):
            raise InvalidParameterError(f"Mardia theta must lie in [-1, 1], got {theta}")
        t2 = theta * theta
        object.__setattr__(self, "theta", float(theta))
        object.__setattr__(self, "a", t2 * (1.0 + theta) / 2.0)
        object.__setattr__(self, "b", t2 * (1.0 - theta) / 2.0)

    @property
    def params(self):
        return {"theta": self.theta}

    @property
    def indep_weight(self) -> float:
        return 1.0 - self.theta * self.theta

    @property
    def spec(self):
        return f"mardia:theta={self.theta!r}"


@dataclass(frozen=True, repr=False)
class Mixture(Copula):
    """Convex combination of copulas.  Build with :func:`mix`."""

    components: tuple[Copula, ...]
    weights: tuple[float, ...]
    kind = "Mixture"

    def __post_init__(self):
        _validate_weights(self.components, self.weights)

    @property
    def params(self):
        return {"components": [c.spec for c in self.components], "weights": list(self.weights)}

    @property
    def spec(self):
        return "mix:" + "+".join(f"{w!r}*{c.spec}" for c, w in zip(self.components, self.weights))

    def _combine(self, method: str, u, v):
        total = 0.0
        for c, w in zip(self.components, self.weights):
            total = total + w * np.asarray(getattr(c, method)(u, v), dtype=float)
        return total

    def cdf(self, u, v):
        return self._combine("cdf", u, v)

    def ac_density(self, u, v):
        return self._combine("ac_density", u, v)

    def ac_conditional_cdf(self, u, v):
        return self._combine("ac_conditional_cdf", u, v)

    def atoms(self, u):
        out = []
        for c, w in zip(self.components, self.weights):
            out.extend((loc, w * m) for loc, m in c.atoms(u))
        return _merge_atoms(out)


@dataclass(frozen=True, repr=False)
class CdfCopula(Copula):
    """Copula given only by a (vectorized) CDF; derivatives by central differences.

    Intended for user-supplied or deliberately corrupted CDFs.  The whole law
    is treated as absolutely continuous.
    """

    cdf_fn: Callable = field(compare=False)
    h: float = 1e-6
    label: str = "custom"
    kind = "Custom"

    @property
    def spec(self):
        return self.label

    def cdf(self, u, v):
        return np.asarray(self.cdf_fn(np.asarray(u, dtype=float), np.asarray(v, dtype=float)), dtype=float)

    def ac_conditional_cdf(self, u, v):
        u = np.asarray(u, dtype=float)
        lo = np.maximum(u - self.h, 0.0)
        hi = np.minimum(u + self.h, 1.0)
        return (self.cdf(hi, v) - self.cdf(lo, v)) / (hi - lo)

    def ac_density(self, u, v):
        h = self.h
        u = np.clip(np.asarray(u, dtype=float), h, 1.0 - h)
        v = np.clip(np.asarray(v, dtype=float), h, 1.0 - h)
        mass = (
            self.cdf(u + h, v + h) - self.cdf(u - h, v + h)
            - self.cdf(u + h, v - h) + self.cdf(u - h, v - h)
        )
        return np.maximum(mass / (4.0 * h * h), 0.0)


def _merge_atoms(atoms: Sequence[Atom]) -> list[Atom]:
    merged: dict[float, float] = {}
    for loc, mass in atoms:
        if mass > 0.0:
            merged[loc] = merged.get(loc, 0.0) + mass
    return sorted(merged.items())


def _validate_weights(components, weights) -> None:
    if len(components) == 0 or len(components) != len(weights):
        raise InvalidParameterError("mixture needs equally many (>0) components and weights")
    w = np.asarray(weights, dtype=float)
    if np.any(~np.isfinite(w)) or np.any(w < 0.0):
        raise InvalidParameterError(f"mixture weights must be nonnegative, got {list(weights)}")
    if abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise InvalidParameterError(f"mixture weights must sum to 1, got {w.sum()!r}")


def mix(components: Sequence[Copula], weights: Sequence[float]) -> Copula:
    """Convex combination ``sum_k w_k C_k``.

    A single component with weight 1 is returned unchanged.
    """
    components = tuple(components)
    weights = tuple(float(w) for w in weights)
    _validate_weights(components, weights)
    if len(components) == 1:
        return components[0]
    return Mixture(components, weights)


@dataclass(frozen=True)
class AxiomReport:
    grid_n: int
    grounded_violation: float
    margin_violation: float
    min_rectangle_mass: float
    tol: float = 1e-12

    @property
    def passed(self) -> bool:
        return (
            self.grounded_violation <= self.tol
            and self.margin_violation <= self.tol
            and self.min_rectangle_mass >= -self.tol
        )

    def to_dict(self) -> dict:
        return {
            "grid_n": self.grid_n,
            "grounded_violation": self.grounded_violation,
            "margin_violation": self.margin_violation,
            "min_rectangle_mass": self.min_rectangle_mass,
            "tol": self.tol,
            "passed": self.passed,
        }


def check_axioms(copula: Copula, grid_n: int) -> AxiomReport:
    """Scan groundedness, uniform margins and 2-increasingness on the grid i/n."""
    if grid_n < 2:
        raise InvalidParameterError("grid_n must be >= 2")
    t = np.linspace(0.0, 1.0, grid_n + 1)
    U, V = np.meshgrid(t, t, indexing="ij")
    C = copula.cdf(U, V)
    grounded = max(np.max(np.abs(C[0, :])), np.max(np.abs(C[:, 0])))
    margins = max(np.max(np.abs(C[:, -1] - t)), np.max(np.abs(C[-1, :] - t)))
    rect = C[1:, 1:] - C[:-1, 1:] - C[1:, :-1] + C[:-1, :-1]
    return AxiomReport(
        grid_n=grid_n,
        grounded_violation=float(grounded),
        margin_violation=float(margins),
        min_rectangle_mass=float(rect.min()),
    )


# ---------------------------------------------------------------------------
# spec mini-language
# ---------------------------------------------------------------------------

def _parse_kv(body: str, allowed: set[str], name: str) -> dict[str, float]:
    out = {}
    for part in filter(None, body.split(",")):
        if "=" not in part:
            raise SpecParseError(f"{name}: expected key=value, got {part!r}")
        key, val = (s.strip() for s in part.split("=", 1))
        if key not in allowed:
            raise SpecParseError(f"{name}: unknown parameter {key!r}")
        try:
            out[key] = float(val)
        except ValueError:
            raise SpecParseError(f"{name}: {key}={val!r} is not a number") from None
    missing = allowed - out.keys()
    if missing:
        raise SpecParseError(f"{name}: missing parameter(s) {sorted(missing)}")
    return out


def parse_copula(spec: str) -> Copula:
    """Build a copula from a spec such as ``frechet:a=0.3,b=0.2``.

    Mixtures are written ``mix:0.5*clayton:alpha=1.0+0.5*indep``.
    """
    spec = spec.strip()
    name, _, body = spec.partition(":")
    name = name.lower()
    if name in ("indep", "p", "independence") and not body:
        return Independence()
    if name == "m" and not body:
        return HoeffdingM()
    if name == "w" and not body:
        return HoeffdingW()
    if name == "clayton":
        return Clayton(**_parse_kv(body, {"alpha"}, name))
    if name == "frechet":
        return Frechet(**_parse_kv(body, {"a", "b"}, name))
    if name == "mardia":
        return Mardia(**_parse_kv(body, {"theta"}, name))
    if name == "mix":
        comps, weights = [], []
        for term in body.split("+"):
            w, star, sub = term.partition("*")
            if not star:
                raise SpecParseError(f"mixture term {term!r} must be weight*spec")
            try:
                weights.append(float(w))
            except ValueError:
                raise SpecParseError(f"mixture weight {w!r} is not a number") from None
            comps.append(parse_copula(sub))
        return mix(comps, weights)
    raise SpecParseError(f"unknown copula spec {spec!r}")
