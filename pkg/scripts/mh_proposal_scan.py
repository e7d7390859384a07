"""Certified versus measured rho_1 for several MH target/proposal pairs.

A useful way to pick a proposal: the certificate is cheap, the measured
value needs the discretized MH copula.
"""

import argparse

from copula_mixing import build_model, certify, mh_sample, mh_transition_matrix, rho_n

PAIRS = [
    ("uniform", "indep-uniform"),
    ("beta:p=2,q=2", "indep-uniform"),
    ("beta:p=3,q=2", "indep-uniform"),
    ("truncnormal:mu=0.5,sigma=0.2", "indep-uniform"),
    ("truncnormal:mu=0.3,sigma=0.1", "indep-uniform"),
    ("beta:p=2,q=2", "rw-uniform:h=0.1"),
    ("beta:p=2,q=2", "rw-uniform:h=0.5"),
]


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--steps", type=int, default=20_000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    print(f"{'target':<30}{'proposal':<20}{'a':>8}{'bound':>9}{'rho1':>9}{'accept':>9}")
    for target, proposal in PAIRS:
        m = build_model(target, proposal)
        cert = certify(m)
        rho1 = rho_n(mh_transition_matrix(m, args.grid))
        rate = mh_sample(m, 0.5, args.steps, args.seed).acceptance_rate
        flag = "" if cert.certified else "  (not certified)"
        print(f"{target:<30}{proposal:<20}{cert.a:>8.4f}{cert.rho1_bound:>9.4f}{rho1:>9.4f}{rate:>9.3f}{flag}")


if __name__ == "__main__":
    main()
