"""Radial interaction potentials.

Three families are provided:

* :class:`PrototypePotential` -- the indicator well ``-1`` on the annulus
  ``|r - 1| <= eps``, zero elsewhere.
* :class:`CompositePotential` -- a smooth attractive-repulsive potential
  built from a truncated ``alpha * r**-s`` repulsion and a smooth well
  whose walls are made from the bump integral :func:`phi`.
* :class:`TabulatedPotential` -- linear interpolation of sampled data.

All potentials are vectorized callables ``w(r)`` with a ``derivative``
method and a ``breakpoints()`` list used by the quadrature code to split
integration panels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .quadrature import gauss_legendre

# Total mass of the bump exp(-1/(1-x^2)) on (-1, 1).  Obtained with
# scipy.integrate.quad (epsabs=1e-14, estimated error 3e-14) and confirmed
# to 40 digits with mpmath.quad split at -0.9, 0, 0.9:
#   0.4439938161680794378230489211705526637612
# test_potential.py recomputes it both ways.
PSI_MASS = 0.44399381616807943782

_TAIL_EDGE = -0.95          # left-tail cutoff for the Laguerre representation
_TABLE_STEP = 0.005
_LOCAL_ORDER = 20
_LAGUERRE_ORDER = 40


class ShapeError(ValueError):
    """A potential does not have the expected repulsive/attractive shape."""

    def __init__(self, message, radii=()):
        super().__init__(message)
        self.radii = list(radii)


class NonDifferentiableError(ValueError):
    """Derivative requested at a jump of a discontinuous potential."""


# ---------------------------------------------------------------------------
# bump function and its normalized integral

def psi(x):
    """Smooth bump ``exp(-1/(1-x^2))`` on (-1, 1), zero elsewhere."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1
    xi = np.where(inside, x, 0.0)
    return np.where(inside, np.exp(-1.0 / ((1.0 - xi) * (1.0 + xi))), 0.0)


def psi_derivative(x):
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1
    xi = np.where(inside, x, 0.0)
    q = (1.0 - xi) * (1.0 + xi)
    return np.where(inside, -2.0 * xi / (q * q) * np.exp(-1.0 / q), 0.0)


def _log_left_tail(y):
    """log of the bump integral over (-1, y] for -1 < y <= _TAIL_EDGE.

    With v = 1/(1-x^2) the integral becomes
    exp(-g) * int_0^inf exp(-u) h(g+u) du,  g = 1/(1-y^2),
    h(v) = 1 / (2 v^2 sqrt(1 - 1/v)),
    which Gauss-Laguerre resolves to ~1e-14 relative accuracy and which
    stays finite in log form long after the integral itself underflows.
    """
    u, w = np.polynomial.laguerre.laggauss(_LAGUERRE_ORDER)
    y = np.asarray(y, dtype=float)
    g = 1.0 / ((1.0 - y) * (1.0 + y))   # factored: 1 + y is exact near -1
    v = g[..., None] + u
    h = 1.0 / (2.0 * v * v * np.sqrt(1.0 - 1.0 / v))
    return -g + np.log(h @ w)


def _build_table():
    edges = np.arange(_TAIL_EDGE, 0.0 + _TABLE_STEP / 2, _TABLE_STEP)
    edges[-1] = 0.0
    x, w = gauss_legendre(_LOCAL_ORDER)
    half = 0.5 * np.diff(edges)
    nodes = (0.5 * (edges[:-1] + edges[1:]))[:, None] + half[:, None] * x
    increments = half * (psi(nodes) @ w)
    cumulative = np.concatenate(
        [[np.exp(_log_left_tail(np.array(_TAIL_EDGE)))], increments]).cumsum()
    return edges, cumulative


_EDGES, _CUMULATIVE = _build_table()
# normalization consistent with the table, so that phi(0) == 0.5 exactly
_TABLE_MASS = 2.0 * _CUMULATIVE[-1]


def _left_integral(y):
    """Bump integral over (-1, y] for y <= 0 (array input)."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    tail = (y > -1.0) & (y <= _TAIL_EDGE)
    if tail.any():
        out[tail] = np.exp(_log_left_tail(y[tail]))
    body = y > _TAIL_EDGE
    if body.any():
        yb = y[body]
        k = np.clip(np.searchsorted(_EDGES, yb, side="right") - 1, 0, len(_EDGES) - 2)
        left = _EDGES[k]
        x, w = gauss_legendre(_LOCAL_ORDER)
        half = 0.5 * (yb - left)
        nodes = (0.5 * (yb + left))[:, None] + half[:, None] * x
        out[body] = _CUMULATIVE[k] + half * (psi(nodes) @ w)
    return out


def phi(x):
    """Normalized integral of :func:`psi`: 0 below -1, 1 above 1.

    Satisfies ``phi(x) + phi(-x) == 1`` by construction (values for
    positive arguments are obtained by reflection).
    """
    x = np.asarray(x, dtype=float)
    neg = -np.abs(x)
    lower = _left_integral(neg) / _TABLE_MASS
    return np.where(x <= 0, lower, 1.0 - lower)


def phi_derivative(x):
    return psi(x) / _TABLE_MASS


def log_phi(x):
    """``log(phi(x))``, accurate where phi underflows (x close to -1)."""
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, -np.inf)
    tail = (x > -1.0) & (x <= _TAIL_EDGE)
    if tail.any():
        out[tail] = _log_left_tail(x[tail]) - np.log(_TABLE_MASS)
    rest = x > _TAIL_EDGE
    if rest.any():
        out[rest] = np.log(phi(x[rest]))
    return out


def phi_direct(x, tol=1e-13):
    """phi by adaptive quadrature from scratch; slow reference for tests."""
    from scipy.integrate import quad

    x = float(x)
    if x <= -1:
        return 0.0
    if x >= 1:
        return 1.0
    f = lambda y: float(np.exp(-1.0 / (1.0 - y * y)))
    num, _ = quad(f, -1.0, x, epsabs=0.0, epsrel=tol, limit=200)
    den, _ = quad(f, -1.0, 1.0, epsabs=0.0, epsrel=tol, limit=200)
    return num / den


# ---------------------------------------------------------------------------
# potentials

class RadialPotential:
    """Interface shared by all radial potentials."""

    #: exponent s of an ``r**-s`` singularity at the origin, if any
    singular_power = None

    def __call__(self, r):
        raise NotImplementedError

    def derivative(self, r):
        raise NotImplementedError

    def breakpoints(self):
        """Radii where the potential or its derivative is not smooth."""
        return ()

    @property
    def singular_at_origin(self):
        return self.singular_power is not None


@dataclass(frozen=True)
class PrototypePotential(RadialPotential):
    """``-1`` for ``|r - 1| <= eps``, ``0`` otherwise."""

    eps: float
    jump_window: float = 1e-9

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(np.abs(r - 1.0) <= self.eps, -1.0, 0.0)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        near = (np.abs(r - (1 - self.eps)) < self.jump_window) | \
               (np.abs(r - (1 + self.eps)) < self.jump_window)
        if np.any(near):
            raise NonDifferentiableError(
                f"prototype potential jumps at r = {1 - self.eps} and {1 + self.eps}")
        return np.zeros_like(r)

    def breakpoints(self):
        return (1 - self.eps, 1 + self.eps)


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    value: object
    deriv: object


@dataclass(frozen=True)
class CompositePotential(RadialPotential):
    """Smooth attractive-repulsive potential.

    ``w(r) = alpha r^-s (1 - phi(4r - 7)) + w2(r)`` where ``w2`` is 0 up to
    ``1 - eps``, descends smoothly to ``-1`` over a layer of width ``beta``,
    stays at ``-1`` up to ``1 + eps - beta`` and then rises to the constant
    ``-1 + 1/phi(-1 + beta)`` reached at ``3 + eps - beta``.
    """

    eps: float
    alpha: float
    beta: float
    power_s: float
    dim: int
    validate: bool = True
    log_phi_beta: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        eps, beta = self.eps, self.beta
        if self.validate:
            if self.dim < 2:
                raise ValueError("dim must be >= 2")
            if not 0 < eps < 0.5:
                raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
            if not 0 < beta < eps:
                raise ValueError(f"beta must lie in (0, eps), got beta={beta}, eps={eps}")
            if not self.alpha > 0:
                raise ValueError(f"alpha must be positive, got {self.alpha}")
            if not self.dim - 2 < self.power_s < self.dim:
                raise ValueError(
                    f"power_s must lie in ({self.dim - 2}, {self.dim}), got {self.power_s}")
        elif not (0 < beta < 1 and self.alpha >= 0 and self.power_s > 0):
            raise ValueError("inconsistent composite parameters")
        lpb = float(log_phi(np.array(-1.0 + beta)))
        if -lpb > np.log(np.finfo(float).max):
            raise ValueError(
                f"beta={beta} too small: far-field value 1/phi(-1+beta) overflows")
        object.__setattr__(self, "log_phi_beta", lpb)

    @property
    def singular_power(self):
        return self.power_s

    @property
    def far_value(self):
        """Constant value taken for ``r >= 3 + eps - beta``."""
        return -1.0 + np.exp(-self.log_phi_beta)

    # -- the well w2, one piece at a time --------------------------------

    def _descent(self, r):
        c = 1 - self.eps + self.beta / 2
        return -phi((r - c) / (self.beta / 2))

    def _descent_d(self, r):
        c = 1 - self.eps + self.beta / 2
        return -phi_derivative((r - c) / (self.beta / 2)) / (self.beta / 2)

    def _ascent(self, r):
        x = r - (2 + self.eps - self.beta)
        return -1.0 + np.exp(log_phi(x) - self.log_phi_beta)

    def _ascent_d(self, r):
        x = np.asarray(r - (2 + self.eps - self.beta), dtype=float)
        inside = np.abs(x) < 1
        xi = np.where(inside, x, 0.0)
        log_d = -1.0 / ((1.0 - xi) * (1.0 + xi)) - np.log(_TABLE_MASS) - self.log_phi_beta
        return np.where(inside, np.exp(log_d), 0.0)

    def pieces(self):
        """The five pieces of the well as (lo, hi, value, derivative)."""
        e, b = self.eps, self.beta
        zero = lambda r: np.zeros_like(np.asarray(r, dtype=float))
        const = lambda c: (lambda r: np.full_like(np.asarray(r, dtype=float), c))
        far = self.far_value
        return [
            Piece(0.0, 1 - e, zero, zero),
            Piece(1 - e, 1 - e + b, self._descent, self._descent_d),
            Piece(1 - e + b, 1 + e - b, const(-1.0), zero),
            Piece(1 + e - b, 3 + e - b, self._ascent, self._ascent_d),
            Piece(3 + e - b, np.inf, const(far), zero),
        ]

    def _piecewise(self, r, attr):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        e, b = self.eps, self.beta
        # closed/open ends follow the defining formula
        masks = [
            r <= 1 - e,
            (r > 1 - e) & (r < 1 - e + b),
            (r >= 1 - e + b) & (r <= 1 + e - b),
            (r > 1 + e - b) & (r < 3 + e - b),
            r >= 3 + e - b,
        ]
        for piece, m in zip(self.pieces(), masks):
            if m.any():
                out[m] = getattr(piece, attr)(r[m])
        return out

    def well(self, r):
        return self._piecewise(r, "value")

    def well_derivative(self, r):
        return self._piecewise(r, "deriv")

    def repulsion(self, r):
        r = np.asarray(r, dtype=float)
        cut = np.ones_like(r)
        mid = (r > 1.5) & (r < 2.0)
        cut[mid] = 1.0 - phi(4 * r[mid] - 7)
        cut[r >= 2.0] = 0.0
        with np.errstate(divide="ignore"):
            return self.alpha * r ** (-self.power_s) * cut

    def repulsion_derivative(self, r):
        r = np.asarray(r, dtype=float)
        s = self.power_s
        cut = np.ones_like(r)
        dcut = np.zeros_like(r)
        mid = (r > 1.5) & (r < 2.0)
        cut[mid] = 1.0 - phi(4 * r[mid] - 7)
        dcut[mid] = -4.0 * phi_derivative(4 * r[mid] - 7)
        cut[r >= 2.0] = 0.0
        with np.errstate(divide="ignore"):
            return self.alpha * (-s * r ** (-s - 1) * cut + r ** (-s) * dcut)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise ValueError("composite potential is singular at r <= 0")
        return self.repulsion(r) + self.well(r)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise ValueError("composite potential is singular at r <= 0")
        return self.repulsion_derivative(r) + self.well_derivative(r)

    def breakpoints(self):
        e, b = self.eps, self.beta
        return (1 - e, 1 - e + b, 1 + e - b, 1 + e, 1.5, 2.0, 3 + e - b)


@dataclass(frozen=True)
class TabulatedPotential(RadialPotential):
    """Linear interpolation of ``values`` at ``radii``; constant beyond."""

    radii: tuple
    values: tuple
    fd_step: float = 1e-6

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if radii.ndim != 1 or radii.shape != values.shape or len(radii) < 1:
            raise ValueError("radii and values must be 1-D of equal length")
        if np.any(np.diff(radii) <= 0):
            raise ValueError("radii must be strictly increasing")
        object.__setattr__(self, "radii", tuple(radii))
        object.__setattr__(self, "values", tuple(values))

    @classmethod
    def constant(cls, c):
        return cls((0.0, 1.0), (c, c))

    def __call__(self, r):
        return np.interp(np.asarray(r, dtype=float), self.radii, self.values)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        h = self.fd_step
        return (self(r + h) - self(r - h)) / (2 * h)

    def breakpoints(self):
        return self.radii


@dataclass(frozen=True)
class PowerLawPotential(RadialPotential):
    """``alpha * r**-power``; singular at the origin."""

    alpha: float
    power: float

    @property
    def singular_power(self):
        return self.power

    def __call__(self, r):
        with np.errstate(divide="ignore"):
            return self.alpha * np.asarray(r, dtype=float) ** (-self.power)

    def derivative(self, r):
        with np.errstate(divide="ignore"):
            return -self.alpha * self.power * np.asarray(r, dtype=float) ** (-self.power - 1)


@dataclass(frozen=True)
class DifferencePotential(RadialPotential):
    """``base - other``; used for the excess of a potential over the prototype."""

    base: RadialPotential
    other: RadialPotential

    @property
    def singular_power(self):
        return self.base.singular_power

    def __call__(self, r):
        return self.base(r) - self.other(r)

    def derivative(self, r):
        return self.base.derivative(r) - self.other.derivative(r)

    def breakpoints(self):
        return tuple(sorted(set(self.base.breakpoints()) | set(self.other.breakpoints())))


def excess_over_prototype(w: CompositePotential) -> DifferencePotential:
    """The nonnegative remainder ``W - W_eps`` of a composite potential."""
    return DifferencePotential(w, PrototypePotential(w.eps))


# ---------------------------------------------------------------------------
# shape verification

@dataclass
class ShapeReport:
    r0: float
    repulsive_verified: bool
    attractive_verified: bool
    grid_resolution: float
    join_max_mismatch: float
    join_max_derivative_mismatch: float
    r_far: float

    def to_dict(self):
        return dict(self.__dict__)


def _join_mismatch(pieces):
    worst_v = worst_d = 0.0
    bad = []
    for left, right in zip(pieces[:-1], pieces[1:]):
        x = np.array([left.hi])
        lv, rv = float(left.value(x)[0]), float(right.value(x)[0])
        ld, rd = float(left.deriv(x)[0]), float(right.deriv(x)[0])
        dv = abs(lv - rv) / max(1.0, abs(lv))
        dd = abs(ld - rd) / max(1.0, abs(ld))
        worst_v, worst_d = max(worst_v, dv), max(worst_d, dd)
        bad.append((left.hi, dv, dd))
    return worst_v, worst_d, bad


def verify_shape(p: CompositePotential, grid_step: float = 1e-3, r_far: float | None = None,
                 tol: float = 1e-12, join_tol: float = 1e-9,
                 join_dtol: float = 1e-7) -> ShapeReport:
    """Check that ``p`` is repulsive at short range and attractive beyond.

    Scans ``w'`` on ``(grid_step, r_far]``, locates the single sign change
    ``r0`` (refined by bisection), and checks that the pieces of the well
    join continuously with continuous first derivative.

    Raises
    ------
    ShapeError
        If the derivative changes sign more than once, never becomes
        nonnegative, or a join is broken.
    """
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    if r_far is None:
        r_far = 3 + p.eps - p.beta + 1
    worst_v, worst_d, joins = _join_mismatch(p.pieces())
    broken = [r for r, dv, dd in joins if dv > join_tol or dd > join_dtol]
    if broken:
        raise ShapeError(f"pieces do not join smoothly at r = {broken}", broken)

    grid = np.arange(1, int(np.floor(r_far / grid_step)) + 1) * grid_step
    d = p.derivative(grid)
    nonneg = np.flatnonzero(d >= 0)
    if len(nonneg) == 0:
        raise ShapeError("derivative negative on the whole grid: no attractive range",
                         [grid[-1]])
    k = nonneg[0]
    if k == 0:
        raise ShapeError("derivative nonnegative at the first grid point: no repulsive range",
                         [grid[0]])
    after = d[k:] < -tol
    if after.any():
        offenders = grid[k:][after]
        raise ShapeError(
            f"derivative changes sign more than once; negative again at "
            f"{len(offenders)} grid points starting r = {offenders[0]:.6g}",
            offenders[:20])
    a, b = grid[k - 1], grid[k]
    if d[k] == 0:
        r0 = b
    else:
        r0 = brentq(lambda x: float(p.derivative(np.array(x))), a, b, xtol=1e-14)
    return ShapeReport(r0=float(r0), repulsive_verified=True, attractive_verified=True,
                       grid_resolution=grid_step, join_max_mismatch=worst_v,
                       join_max_derivative_mismatch=worst_d, r_far=float(r_far))
