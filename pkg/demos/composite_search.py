"""Find and audit a smooth potential without radial minimizers.

Halves the repulsion strength and the wall width together until the
composite certificate holds, then prints the two sides of the energy
condition, the closed-form bound on the excess, and the shape of the
potential (where it turns from repulsive to attractive).

    python3 demos/composite_search.py
"""

import numpy as np

from radsym.certificate import search_alpha_beta
from radsym.potential import CompositePotential


def main(eps=0.05, power_s=0.5, dim=2):
    alpha, beta, rep = search_alpha_beta(eps, power_s, dim)
    print("tried (alpha, beta, margin):")
    for a, b, m in rep.audit["search"]["tried"]:
        print(f"  {a:<9.6g} {b:<10.6g} {m:+.5f}")
    print(f"certified alpha={alpha}, beta={beta}")
    print(f"sup of ball-averaged excess {rep.condition_lhs:.6f} < {rep.condition_rhs:.6f}")
    chain = rep.audit["proof_chain"]
    print(f"closed-form excess bound: repulsion {chain['repulsion']:.5f} + "
          f"walls {chain['annulus']:.5f} = {chain['total']:.5f}")
    print(f"competitor energy {rep.competitor_energy:.6f}, "
          f"radial lower bound {rep.radial_lower_bound:.6f}")

    w = CompositePotential(eps, alpha, beta, power_s, dim)
    print(f"w' changes sign once, at r0 = {rep.audit['shape']['r0']:.6f}")
    r = np.array([0.1, 0.5, 0.9, 1 - eps + beta, 1.0, 1.2, 2.0, 3.0, 3.1])
    for ri, wi in zip(r, w(r)):
        print(f"  w({ri:.5f}) = {wi:.6g}")


if __name__ == "__main__":
    main()
