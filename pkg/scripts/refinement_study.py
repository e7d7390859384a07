"""rho_1, beta_1, phi_1 and the constant-minorant bound across grid sizes."""

import argparse

from copula_mixing import beta_n, discretize, extract_constant_minorant, parse_copula, phi_n, rho_n

DEFAULT = ["indep", "clayton:alpha=1.0", "clayton:alpha=3.0", "frechet:a=0.3,b=0.2",
           "mardia:theta=0.5", "mix:0.5*clayton:alpha=1.0+0.5*indep", "w"]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--grids", default="25,50,100,200,400")
    p.add_argument("copulas", nargs="*", default=DEFAULT)
    args = p.parse_args()
    grids = [int(g) for g in args.grids.split(",")]
    for spec in args.copulas:
        c = parse_copula(spec)
        print(spec)
        print(f"  {'n':>5}{'rho1':>10}{'beta1':>10}{'phi1':>10}{'eps':>10}{'bound':>10}")
        for n in grids:
            Q = discretize(c, n)
            eps, bound = extract_constant_minorant(c, n)
            print(f"  {n:>5}{rho_n(Q):>10.5f}{beta_n(Q):>10.5f}{phi_n(Q):>10.5f}{eps:>10.5f}{bound:>10.5f}")


if __name__ == "__main__":
    main()
