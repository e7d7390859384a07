"""Acceptance criteria 1-10.

Each ``criterion_N`` returns ``(ok, detail)``.  Under pytest the outcome is
recorded for the terminal summary and asserted; run as a script, one
pass/fail line per criterion is printed.
"""

from __future__ import annotations

import io
import json
import sys
import time
from contextlib import redirect_stdout
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate, stats

sys.path.insert(0, str(Path(__file__).parent))
from conftest import ACCEPTANCE_RESULTS, BUILTINS  # noqa: E402

from copula_mixing import (  # noqa: E402
    Frechet, HoeffdingM, Independence, Mardia, beta_n, build_model, certify_independent,
    discretize, empirical_corr, extract_constant_minorant, inequality_audit, mh_copula_ac_density,
    mh_rejection_mass, mh_sample, mh_transition_matrix, mix, phi_n, rho_n, sample_path,
)
from copula_mixing.chain import TEST_FUNCTIONS, correlation_table  # noqa: E402
from copula_mixing.cli import main as cli_main  # noqa: E402

N_PATH = 100_000


def _cli_json(*argv: str) -> tuple[int, dict]:
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli_main(list(argv))
    return code, json.loads(buf.getvalue())


def criterion_1():
    t0 = time.perf_counter()
    code, d = _cli_json("mixing", "--copula", "frechet:a=0.3,b=0.2", "--grid", "200", "--lags", "1,2,3,4")
    elapsed = time.perf_counter() - t0
    errs = [abs(r - 0.5**k) for k, r in zip(d["lags"], d["rho"])]
    ok = code == 0 and max(errs) <= 0.01 and elapsed < 30
    return ok, f"rho={np.round(d['rho'], 6).tolist()} max|rho_k-0.5^k|={max(errs):.2e} t={elapsed:.2f}s"


def criterion_2():
    theta = 0.5
    rho1 = rho_n(discretize(Mardia(theta), 200))
    t2 = theta * theta
    equivalent = mix([HoeffdingM(), Independence(), BUILTINS["w"]],
                     [t2 * (1 + theta) / 2, 1 - t2, t2 * (1 - theta) / 2])
    g = np.linspace(0, 1, 100)
    U, V = np.meshgrid(g, g)
    gap = float(np.max(np.abs(Mardia(theta).cdf(U, V) - equivalent.cdf(U, V))))
    ok = abs(rho1 - 0.25) <= 0.01 and gap <= 1e-12
    return ok, f"rho1={rho1:.6f} max cdf gap={gap:.1e}"


def criterion_3():
    parts, ok = [], True
    for name, c in BUILTINS.items():
        eps, bound = extract_constant_minorant(c, 200)
        if eps <= 0:
            continue
        rho1 = rho_n(discretize(c, 200))
        ok &= rho1 <= bound + 0.01
        parts.append(f"{name}: {rho1:.4f}<={bound:.4f}")
    eps, bound = extract_constant_minorant(Frechet(0.3, 0.2), 200)
    ok &= abs(bound - 0.75) <= 1e-12
    return ok, "; ".join(parts)


def criterion_4():
    t0 = time.perf_counter()
    worst = {}
    ok = True
    for name in ("clayton1", "frechet", "mardia", "indep"):
        audit = inequality_audit(discretize(BUILTINS[name], 200), 5)
        ok &= audit.passed
        worst[name] = min(e.margin for g in (audit.beta_le_phi, audit.rho_le_2sqrtphi, audit.rho_submult)
                          for e in g)
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120
    return ok, f"min margins={ {k: float(f'{v:.2e}') for k, v in worst.items()} } t={elapsed:.1f}s"


def criterion_5():
    n = 200
    Qi, Qm = discretize(Independence(), n), discretize(HoeffdingM(), n)
    ind = max(max(rho_n(Qi, k), beta_n(Qi, k), phi_n(Qi, k)) for k in range(1, 6))
    rho_m, beta_m = rho_n(Qm), beta_n(Qm)
    ok = ind <= 1e-9 and rho_m == 1.0 and beta_m == (n - 1) / n
    return ok, f"indep max={ind:.1e} M: rho1={rho_m} beta1={beta_m!r} (n-1)/n={(n - 1) / n!r}"


def criterion_6():
    grids = (25, 50, 100, 200)
    ok, bad = True, []
    for name, c in BUILTINS.items():
        r = [rho_n(discretize(c, n)) for n in grids]
        if any(b < a - 1e-9 for a, b in zip(r, r[1:])):
            ok = False
            bad.append(name)
    return ok, f"{len(BUILTINS)} families over {grids}; violations: {bad or 'none'}"


def criterion_7():
    m = build_model("beta:p=2,q=2", "indep-uniform")
    cert = certify_independent(m)
    rho1 = rho_n(mh_transition_matrix(m, 200))
    g = (np.arange(50) + 0.5) / 50
    U, V = np.meshgrid(g, g, indexing="ij")
    c = mh_copula_ac_density(m, U, V)
    asym = float(np.max(np.abs(c - c.T)))
    ok = abs(cert.a - 2 / 3) <= 0.01 and cert.rho1_bound < 1 and rho1 <= cert.rho1_bound + 0.01 and asym <= 1e-10
    return ok, f"a={cert.a:.6f} bound={cert.rho1_bound:.6f} rho1={rho1:.6f} asym={asym:.1e}"


def criterion_8():
    m = build_model("beta:p=2,q=2", "indep-uniform")
    f = m.target.pdf
    worst = 0.0
    for u in np.linspace(0.01, 0.99, 50):
        x = float(m.target.ppf(u))
        fx = float(f(x))
        accepted = integrate.quad(lambda y: min(float(f(y)) / fx, 1.0), 0, 1, points=[x],
                                  epsabs=1e-12, limit=200)[0]
        worst = max(worst, abs(accepted + mh_rejection_mass(m, float(u)) - 1.0))
    path = mh_sample(m, 0.5, N_PATH, seed=0)
    half = path.states[len(path.states) // 2:]
    ks = stats.kstest(half, m.target.cdf).statistic
    crit = 1.63 / np.sqrt(len(half))
    ok = worst <= 1e-6 and ks < crit
    return ok, f"max row-mass error={worst:.1e} KS={ks:.5f} < {crit:.5f}"


def criterion_9():
    path = sample_path(Frechet(0.3, 0.2), 0.5, N_PATH, seed=0)
    n = len(path.states)
    p1 = empirical_corr(path, 1, "P1", "P1")
    rho1 = rho_n(discretize(Frechet(0.3, 0.2), 200))
    excess = max(abs(r) for r in correlation_table(path, 1).values()) - rho1
    p1_ok = abs(p1 - 0.5) <= 0.015
    excess_ok = excess <= 3 / np.sqrt(n)
    return p1_ok and excess_ok, (
        f"P1 lag-1 corr={p1:.4f} (required 0.5+-0.015: {'ok' if p1_ok else 'FAIL'}; "
        f"P2={empirical_corr(path, 1, 'P2', 'P2'):.4f}); max excess over rho1={excess:.4f} "
        f"<= {3 / np.sqrt(n):.4f}: {'ok' if excess_ok else 'FAIL'}"
    )


def criterion_10():
    same = []
    for c in (BUILTINS["frechet"], BUILTINS["clayton1"], mix([HoeffdingM(), Independence()], [0.4, 0.6])):
        a, b = sample_path(c, 0.3, 20_000, seed=11), sample_path(c, 0.3, 20_000, seed=11)
        same.append(a.states.tobytes() == b.states.tobytes() and a.to_csv() == b.to_csv())
    m = build_model("beta:p=2,q=2", "indep-uniform")
    same.append(mh_sample(m, 0.5, 20_000, seed=4).states.tobytes()
                == mh_sample(m, 0.5, 20_000, seed=4).states.tobytes())
    reports = []
    for _ in range(2):
        reports.append((_cli_json("mixing", "--copula", "clayton:alpha=1.0", "--grid", "80"),
                        _cli_json("mh", "--target", "beta:p=2,q=2", "--proposal", "indep-uniform",
                                  "--grid", "80"),
                        _cli_json("simulate", "--copula", "frechet:a=0.3,b=0.2", "--steps", "5000",
                                  "--seed", "5")))
    same.append(reports[0] == reports[1])
    different = sample_path(BUILTINS["frechet"], 0.3, 1000, 1).states.tobytes() != \
        sample_path(BUILTINS["frechet"], 0.3, 1000, 2).states.tobytes()
    ok = all(same) and different
    return ok, f"{sum(same)}/{len(same)} identical reruns; distinct seeds differ: {different}"


CRITERIA = {
    "1 Frechet spectrum": criterion_1,
    "2 Mardia reduction": criterion_2,
    "3 minorant certificate": criterion_3,
    "4 inequality chain": criterion_4,
    "5 degenerate anchors": criterion_5,
    "6 monotone refinement": criterion_6,
    "7 MH certification": criterion_7,
    "8 MH conservation and stationarity": criterion_8,
    "9 simulation cross-check": criterion_9,
    "10 determinism": criterion_10,
}


@pytest.mark.parametrize("name", list(CRITERIA), ids=[k.split()[0] for k in CRITERIA])
def test_criterion(name):
    ok, detail = CRITERIA[name]()
    ACCEPTANCE_RESULTS[name] = (ok, detail)
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {name}: {detail}")
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for name, fn in CRITERIA.items():
        ok, detail = fn()
        failures += not ok
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {name}: {detail}", flush=True)
    sys.exit(1 if failures else 0)
