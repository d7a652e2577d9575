"""Radial symmetry breaking for interaction energies.

Potentials with a narrow attractive well at unit distance, the energy of
radial measures through shell-to-shell kernels, certificates showing that
a simplex configuration beats every radial measure, and a particle
minimizer with diagnostics.
"""

from .certificate import (CertificateReport, certify_composite, certify_general,
                          certify_prototype, epsilon0, search_alpha_beta,
                          simplex_energy_prototype)
from .measures import (DiscreteMeasure, MollifiedBallMeasure, RadialProfile, rho_star_eta,
                       unit_simplex_vertices, validate_profile)
from .minimizer import (AsymmetryDiagnostics, CollapseError, DescentSpec,
                        ParticleConfiguration, diagnose, gradient_descent, particle_energy,
                        particle_gradient, radialize_energy)
from .potential import (CompositePotential, PrototypePotential, TabulatedPotential, phi, psi,
                        verify_shape)
from .quadrature import QuadratureSpec
from .radial_energy import (ball_average, kernel_eval, kernel_partial_integral, kernel_sup,
                            krs_analytic_bound, radial_energy, radial_lower_bound, tilde_w,
                            tilde_w_mc_oracle)

__version__ = "0.1.0"
