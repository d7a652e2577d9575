"""Particle descent under the certified composite potential.

Two starting points: the small-ball simplex competitor and a random
Gaussian cloud.  The first stays in three clusters with energy below
every radial measure; the second settles into a single compact cloud,
a local minimizer that gradient descent cannot leave.

    python3 demos/particle_descent.py [iterations]
"""

import sys

import numpy as np

from radsym.measures import rho_star_eta, sample_balls
from radsym.minimizer import DescentSpec, ParticleConfiguration, diagnose, gradient_descent
from radsym.potential import CompositePotential


def competitor_start(per_vertex=30, eta=0.025, seed=0):
    m = rho_star_eta(2, eta)
    rng = np.random.default_rng(seed)
    return ParticleConfiguration(np.vstack([sample_balls(m, k, per_vertex, rng)
                                            for k in range(3)]))


def run(label, w, spec, start=None):
    res = gradient_descent(w, spec, start)
    d = diagnose(w, res.config)
    print(f"{label}: E = {res.energy:.5f} after {len(res.energies) - 1} steps ({res.reason}); "
          f"clusters {d.cluster_count}; radialized {d.radialized_energy:.4g}; "
          f"below radial bound {d.radial_lower_bound:.5f}: {d.below_radial_bound}")


def main(iters=1000):
    w = CompositePotential(0.05, 0.00625, 0.0015625, 0.5, 2)
    spec = DescentSpec(dim=2, n_particles=90, max_iters=iters)
    run("simplex of small balls", w, spec, competitor_start())
    run("gaussian cloud        ", w, spec)


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 1000)
