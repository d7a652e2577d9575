"""Equal-mass particle approximation of the interaction energy.

``N`` particles of mass ``1/N`` carry the energy
``E = 1/(2 N^2) sum_{i != j} w(|x_i - x_j|)``; self-interaction is
excluded so singular potentials stay finite and the Dirac simplex has
energy ``-d/(2(d+1))`` under the prototype potential.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from .potential import PrototypePotential, RadialPotential
from .quadrature import DEFAULT_QUAD, QuadratureSpec
from .radial_energy import radial_lower_bound, tilde_w

COLLAPSE_DISTANCE = 1e-12


class CollapseError(RuntimeError):
    """Two particles coincided under a potential that is singular at 0."""


@dataclass
class ParticleConfiguration:
    positions: np.ndarray

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if not np.all(np.isfinite(self.positions)):
            raise ValueError("positions must be finite")

    @property
    def n(self):
        return self.positions.shape[0]

    @property
    def dim(self):
        return self.positions.shape[1]


@dataclass(frozen=True)
class DescentSpec:
    dim: int = 2
    n_particles: int | None = None      # default 30 (d + 1)
    max_iters: int = 5000
    step0: float = 1.0
    shrink: float = 0.5
    armijo: float = 1e-4
    grad_tol: float = 1e-9
    seed: int = 0
    init: str = "gaussian"              # gaussian | uniform_ball | from_file
    init_scale: float = 1.0
    min_move: float = 1e-4
    stall_iters: int = 50

    def __post_init__(self):
        if not 0 < self.shrink < 1 or not 0 < self.armijo < 1:
            raise ValueError("shrink and armijo must lie in (0, 1)")
        if (self.max_iters < 1 or self.stall_iters < 1 or self.step0 <= 0 or self.grad_tol <= 0 or self.init_scale <= 0
                or self.min_move <= 0):
            raise ValueError("max_iters, step0, grad_tol, init_scale, min_move, stall_iters must be positive")
        if self.init not in ("gaussian", "uniform_ball", "from_file"):
            raise ValueError(f"unknown init {self.init!r}")

    @property
    def particles(self):
        return self.n_particles or 30 * (self.dim + 1)


def _pairs(x):
    i, j = np.triu_indices(len(x), k=1)
    diff = x[i] - x[j]
    return i, j, diff, np.linalg.norm(diff, axis=1)


def _check_collapse(p, dist):
    if p.singular_at_origin and len(dist) and dist.min() < COLLAPSE_DISTANCE:
        raise CollapseError(f"particles coincide (min distance {dist.min():.3e})")


def particle_energy(p: RadialPotential, c: ParticleConfiguration) -> float:
    """``1/(2N^2) sum_{i != j} w(|x_i - x_j|)``."""
    n = c.n
    if n < 2:
        return 0.0
    _, _, _, dist = _pairs(c.positions)
    _check_collapse(p, dist)
    # exact summation, so integer-valued sums divide with a single rounding
    return math.fsum(p(dist)) / (n * n)


def particle_gradient(p: RadialPotential, c: ParticleConfiguration) -> np.ndarray:
    """Gradient of :func:`particle_energy` with respect to every position."""
    x = c.positions
    n = len(x)
    grad = np.zeros_like(x)
    if n < 2:
        return grad
    i, j, diff, dist = _pairs(x)
    _check_collapse(p, dist)
    f = (p.derivative(dist) / dist)[:, None] * diff
    np.add.at(grad, i, f)
    np.add.at(grad, j, -f)
    return grad / (n * n)


def _energy_or_inf(p, x):
    n = len(x)
    _, _, _, dist = _pairs(x)
    if p.singular_at_origin and dist.min() < COLLAPSE_DISTANCE:
        return np.inf
    e = float(np.sum(p(dist))) / (n * n)
    return e if np.isfinite(e) else np.inf


def initial_configuration(spec: DescentSpec) -> ParticleConfiguration:
    rng = np.random.default_rng(spec.seed)
    n, d = spec.particles, spec.dim
    if spec.init == "gaussian":
        x = spec.init_scale * rng.standard_normal((n, d))
    elif spec.init == "uniform_ball":
        g = rng.standard_normal((n, d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        x = g * (spec.init_scale * rng.random(n) ** (1.0 / d))[:, None]
    else:
        raise ValueError("init='from_file' needs an explicit initial configuration")
    return ParticleConfiguration(x)


@dataclass
class DescentResult:
    config: ParticleConfiguration
    energies: np.ndarray
    grad_norms: np.ndarray
    steps: np.ndarray
    converged: bool
    reason: str

    @property
    def energy(self):
        return float(self.energies[-1])

    def trace_rows(self):
        return [(k, e, g, s) for k, (e, g, s) in
                enumerate(zip(self.energies, self.grad_norms, self.steps))]


def gradient_descent(p: RadialPotential, spec: DescentSpec,
                     initial: ParticleConfiguration | None = None) -> DescentResult:
    """Steepest descent with Armijo backtracking.

    The trial step is the Barzilai-Borwein step ``s.s / s.y`` of the last
    move (twice the previous step when that curvature is not positive),
    capped at ``step0 * 2**20``, raised so that the trial moves some particle
    by at least ``min_move``, and then shrunk until the sufficient-decrease
    test holds.  The energy trace therefore never increases.  Stops when the largest
    per-particle gradient norm drops below ``grad_tol``, after
    ``max_iters`` iterations, when no admissible step remains, or after
    ``stall_iters`` consecutive steps that leave the energy unchanged
    (the gradient is then at the floating-point floor of a stiff wall).
    """
    if isinstance(p, PrototypePotential):
        raise ValueError("the prototype potential is piecewise constant; "
                         "minimize a smooth potential instead")
    c = initial if initial is not None else initial_configuration(spec)
    x = c.positions.copy()
    e = particle_energy(p, ParticleConfiguration(x))
    g = particle_gradient(p, ParticleConfiguration(x))
    step = spec.step0
    step_max = spec.step0 * 2.0 ** 20
    energies, gnorms, steps = [e], [], []
    converged, reason = False, "max_iters"
    flat = 0
    for _ in range(spec.max_iters):
        gmax = float(np.max(np.linalg.norm(g, axis=1)))
        gnorms.append(gmax)
        if gmax < spec.grad_tol:
            converged, reason = True, "grad_tol"
            steps.append(0.0)
            break
        g2 = float(np.sum(g * g))
        step = min(max(step, spec.min_move / gmax), step_max)
        while True:
            trial = x - step * g
            e_new = _energy_or_inf(p, trial)
            if e_new <= e - spec.armijo * step * g2:
                break
            step *= spec.shrink
            if step < 1e-300:
                break
        if step < 1e-300:
            reason = "line_search_failed"
            steps.append(0.0)
            break
        g_new = particle_gradient(p, ParticleConfiguration(trial))
        sy = float(np.sum((trial - x) * (g_new - g)))
        ss = float(np.sum((trial - x) ** 2))
        steps.append(step)
        step = ss / sy if sy > 0 and ss > 0 else 2.0 * step
        flat = flat + 1 if e_new >= e else 0
        x, e, g = trial, e_new, g_new
        energies.append(e)
        if flat >= spec.stall_iters:
            reason = "stalled"
            gnorms.append(float(np.max(np.linalg.norm(g, axis=1))))
            steps.append(0.0)
            break
    else:
        gnorms.append(float(np.max(np.linalg.norm(g, axis=1))))
        steps.append(0.0)
    return DescentResult(ParticleConfiguration(x), np.array(energies), np.array(gnorms),
                         np.array(steps), converged, reason)


def radialize_energy(p: RadialPotential, c: ParticleConfiguration,
                     quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Energy after replacing every particle by the shell through it.

    Shells are centred at the centroid; the shell of particle ``i`` does
    not interact with itself, matching :func:`particle_energy`.
    """
    n = c.n
    if n < 2:
        return 0.0
    x = c.positions - c.positions.mean(axis=0)
    rad = np.linalg.norm(x, axis=1)
    i, j = np.triu_indices(n, k=1)
    vals = tilde_w(p, rad[i], rad[j], c.dim, quad)
    return float(np.sum(vals)) / (n * n)


def cluster_count(c: ParticleConfiguration, threshold: float = 0.2) -> int:
    """Number of single-linkage clusters when merging below ``threshold``."""
    if c.n < 2:
        return c.n
    z = linkage(c.positions, method="single")
    return int(fcluster(z, t=threshold, criterion="distance").max())


@lru_cache(maxsize=32)
def _cached_lower_bound(eps, dim):
    return radial_lower_bound(eps, dim, "numeric").lower_bound


@dataclass
class AsymmetryDiagnostics:
    particle_energy: float
    radialized_energy: float
    radial_gap: float
    cluster_count: int
    cluster_radius_threshold: float
    below_radial_bound: bool
    radial_lower_bound: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def diagnose(p: RadialPotential, c: ParticleConfiguration,
             quad: QuadratureSpec = DEFAULT_QUAD, cluster_radius_threshold: float = 0.2,
             lower_bound: float | None = None) -> AsymmetryDiagnostics:
    """Compare a configuration with its radialization and the radial bound.

    The radial bound is looked up from the potential's ``eps`` (prototype
    and composite potentials both dominate the prototype well) unless
    given explicitly.
    """
    e = particle_energy(p, c)
    er = radialize_energy(p, c, quad)
    if lower_bound is None and hasattr(p, "eps"):
        lower_bound = _cached_lower_bound(float(p.eps), c.dim)
    below = bool(lower_bound is not None and e < lower_bound)
    return AsymmetryDiagnostics(particle_energy=e, radialized_energy=er, radial_gap=er - e,
                                cluster_count=cluster_count(c, cluster_radius_threshold),
                                cluster_radius_threshold=cluster_radius_threshold,
                                below_radial_bound=below, radial_lower_bound=lower_bound)
