"""Compare grid rho_k of Frechet/Mardia chains with the closed-form spectrum.

The operator of a*M + b*W + (1-a-b)*Pi acts on mean-zero functions with
eigenvalue a+b on even functions (about 1/2) and a-b on odd ones, so
rho_k = max(|a+b|, |a-b|)^k.
"""

import argparse

from copula_mixing import Frechet, Mardia, discretize, rho_n


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--max-lag", type=int, default=5)
    args = p.parse_args()
    cases = [("frechet a=0.3 b=0.2", Frechet(0.3, 0.2)), ("frechet a=0.1 b=0.6", Frechet(0.1, 0.6)),
             ("mardia theta=0.5", Mardia(0.5)), ("mardia theta=-0.8", Mardia(-0.8))]
    print(f"{'copula':<22}{'lag':>4}{'grid rho':>12}{'closed form':>13}{'abs err':>10}")
    for label, c in cases:
        Q = discretize(c, args.grid)
        top = max(abs(c.a + c.b), abs(c.a - c.b))
        for k in range(1, args.max_lag + 1):
            r = rho_n(Q, k)
            print(f"{label:<22}{k:>4}{r:>12.6f}{top**k:>13.6f}{abs(r - top**k):>10.1e}")


if __name__ == "__main__":
    main()
