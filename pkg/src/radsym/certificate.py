"""Symmetry-breaking certificates.

A certificate compares the energy of an explicit competitor (the unit
simplex, as Diracs or small balls) with a lower bound valid for every
radial probability measure.  If the competitor is strictly lower, no
energy minimizer can be radial.  A failed certificate asserts nothing.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .potential import (CompositePotential, RadialPotential, ShapeError,
                        excess_over_prototype, verify_shape)
from .quadrature import DEFAULT_QUAD, QuadratureSpec
from .radial_energy import (BoundReport, SearchSpec, ball_average, ball_volume,
                            radial_lower_bound, surface_area)

SCHEMA_VERSION = 1
DEFAULT_SLACK = 1e-9


class SearchExhausted(RuntimeError):
    """No certified (alpha, beta) pair was found."""


@dataclass
class CertificateReport:
    kind: str
    dim: int
    c0: float
    radial_lower_bound: float
    competitor_energy: float
    margin: float
    passed: bool
    eps: float | None = None
    eta: float | None = None
    alpha: float | None = None
    beta: float | None = None
    power_s: float | None = None
    condition_lhs: float | None = None
    condition_rhs: float | None = None
    slack: float = DEFAULT_SLACK
    checks: dict = field(default_factory=dict)
    audit: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def recompute_passed(self) -> bool:
        """Re-derive ``passed`` from the stored numbers."""
        if self.kind == "prototype":
            margin = self.radial_lower_bound - self.competitor_energy
        else:
            margin = 0.5 * (self.condition_rhs - self.condition_lhs)
        if not np.isclose(margin, self.margin, rtol=0, atol=1e-12):
            return False
        required = [v for k, v in self.checks.items() if k.endswith("_ok")]
        return bool(margin > self.slack and all(required))

    def to_dict(self):
        return jsonable(asdict(self))

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schema_version')}")
        return cls(**d)


def jsonable(x):
    """Recursively convert numpy scalars/arrays and non-finite floats for JSON."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return jsonable(x.item())
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, float) and not np.isfinite(x):
        return repr(x)
    return x


def epsilon0(dim: int) -> float:
    """Width below which the prototype certificate is guaranteed to pass."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if dim == 2:
        return (5 * np.pi / (44 * np.sqrt(2))) ** 2
    return (dim - 1) * surface_area(dim - 1) / (32 * dim * surface_area(dim - 2))


def simplex_energy_prototype(dim: int) -> float:
    """Prototype energy of d+1 equal Diracs on a unit simplex: -d / (2(d+1))."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    return -dim / (2 * (dim + 1))


def certify_prototype(eps: float, dim: int, mode: str = "analytic",
                      quad: QuadratureSpec = DEFAULT_QUAD, search: SearchSpec = SearchSpec(),
                      slack: float = DEFAULT_SLACK) -> CertificateReport:
    """Certificate for the indicator-well potential with the Dirac simplex."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    bound = radial_lower_bound(eps, dim, mode, quad, search)
    competitor = simplex_energy_prototype(dim)
    margin = bound.lower_bound - competitor
    checks = {
        "sup_below_(d-1)/d": bool(bound.sup_value < (dim - 1) / dim),
        "eps_below_epsilon0": bool(eps < epsilon0(dim)),
    }
    return CertificateReport(kind="prototype", dim=dim, eps=eps, c0=bound.c0,
                             radial_lower_bound=bound.lower_bound,
                             competitor_energy=competitor, margin=margin,
                             passed=bool(margin > slack), slack=slack, checks=checks,
                             audit={"bound": bound.to_dict()})


def sup_ball_average(w1: RadialPotential, eta: float, dim: int, grid_step: float = 1e-3,
                     quad: QuadratureSpec = DEFAULT_QUAD, top: int = 3) -> dict:
    """Upper estimate of ``sup_{|x| < 1 + eta}`` of the ball average of ``w1``.

    Grid over ``|x|`` plus bounded refinement of the best grid cells; the
    result is inflated by the change to the neighbours at 1/1000 of the
    grid spacing.
    """
    x_end = (1 + eta) * (1 - 1e-12)
    xs = np.append(np.arange(0.0, x_end, grid_step), x_end)
    vals = ball_average(w1, xs, eta, dim, quad)
    order = np.argsort(vals)[::-1][:top]
    best_x, best_v = float(xs[order[0]]), float(vals[order[0]])
    for k in order:
        lo, hi = max(0.0, xs[k] - grid_step), min(x_end, xs[k] + grid_step)
        res = minimize_scalar(lambda x: -float(ball_average(w1, x, eta, dim, quad)),
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": grid_step * 1e-4})
        if -res.fun > best_v:
            best_x, best_v = float(res.x), float(-res.fun)
    h = grid_step * 1e-3
    nb = np.clip([best_x - h, best_x + h], 0.0, x_end)
    nv = ball_average(w1, nb, eta, dim, quad)
    margin = float(np.max(np.abs(nv - best_v)))
    best_v = max(best_v, float(nv.max()))
    return {"value": best_v + margin, "raw": best_v, "argmax": best_x,
            "safety_margin": margin, "grid_step": grid_step, "n_grid": len(xs)}


def _check_nonnegative(w1, r_max=5.0, n=20001):
    r = np.linspace(r_max / n, r_max, n)
    m = float(np.min(w1(r)))
    if m < -1e-12:
        raise ValueError(f"W1 must be nonnegative; min on grid is {m:.3e}")
    return m


def certify_general(w1: RadialPotential, eps: float, dim: int, eta: float | None = None,
                    mode: str = "numeric", quad: QuadratureSpec = DEFAULT_QUAD,
                    search: SearchSpec = SearchSpec(), grid_step: float = 1e-3,
                    slack: float = DEFAULT_SLACK, bound: BoundReport | None = None,
                    ) -> CertificateReport:
    """Certificate for ``W = W_eps + W1`` with ``W1 >= 0`` radial.

    The competitor is the simplex with balls of radius ``eta`` (default
    ``eps/2``); its energy is at most ``-d/(2(d+1)) + lhs/2`` where ``lhs``
    is the largest average of ``W1`` over a ball of radius ``eta`` centred
    within ``1 + eta`` of the origin.  The report's ``margin`` is the gap
    between the radial lower bound and that energy, i.e. half the gap
    between the two sides of the condition ``lhs < rhs``.
    """
    eta = 0.5 * eps if eta is None else eta
    if not 0 < eta <= 0.5 * eps:
        raise ValueError(f"eta must lie in (0, eps/2], got {eta}")
    e0 = epsilon0(dim)
    if not eps < e0:
        raise ValueError(f"eps={eps} must be below epsilon0({dim})={e0:.6g}")
    w1_min = _check_nonnegative(w1)
    if bound is None:
        bound = radial_lower_bound(eps, dim, mode, quad, search)
    sup = sup_ball_average(w1, eta, dim, grid_step, quad)
    lhs = sup["value"]
    rhs = dim / (dim + 1) - 0.5 / (1 - bound.c0)
    margin = 0.5 * (rhs - lhs)
    competitor = simplex_energy_prototype(dim) + 0.5 * lhs
    return CertificateReport(kind="general", dim=dim, eps=eps, eta=eta, c0=bound.c0,
                             radial_lower_bound=bound.lower_bound,
                             competitor_energy=competitor, condition_lhs=lhs,
                             condition_rhs=rhs, margin=margin,
                             passed=bool(margin > slack), slack=slack,
                             checks={"w1_grid_min": w1_min},
                             audit={"bound": bound.to_dict(), "ball_average_sup": sup})


def proof_chain_bounds(eps, alpha, beta, power_s, dim, eta):
    """Closed-form upper bounds on the two parts of the composite's excess.

    ``repulsion``: ball average of ``alpha r^-s`` is largest for the ball
    centred at the origin, ``alpha |S^(d-1)| eta^-s / ((d - s) |B_1|)``.
    ``annulus``: the smooth walls live on two shells of width ``beta``
    where the excess is at most 1, ``beta |S^(d-1)| 2 (1+eps)^(d-1) / |B_eta|``.
    """
    area = surface_area(dim - 1)
    rep = alpha * area * eta ** (-power_s) / ((dim - power_s) * ball_volume(dim))
    ann = beta * area * 2 * (1 + eps) ** (dim - 1) / (ball_volume(dim) * eta ** dim)
    return {"repulsion": rep, "annulus": ann, "total": rep + ann}


def certify_composite(eps: float, alpha: float, beta: float, power_s: float, dim: int,
                      mode: str = "numeric", quad: QuadratureSpec = DEFAULT_QUAD,
                      search: SearchSpec = SearchSpec(), grid_step: float = 1e-3,
                      slack: float = DEFAULT_SLACK, bound: BoundReport | None = None,
                      shape_grid: float = 1e-3) -> CertificateReport:
    """Certificate for the smooth composite potential, with ``eta = eps/2``.

    Passing requires both the energy condition and the shape check
    (single change of monotonicity, smooth joins).
    """
    strict = alpha > 0
    w = CompositePotential(eps, alpha, beta, power_s, dim, validate=strict)
    if not beta < eps:
        raise ValueError("beta must be smaller than eps")
    w1 = excess_over_prototype(w)
    rep = certify_general(w1, eps, dim, 0.5 * eps, mode, quad, search, grid_step,
                          slack, bound)
    try:
        shape = verify_shape(w, grid_step=shape_grid)
        shape_ok, shape_info = True, shape.to_dict()
    except ShapeError as exc:
        shape_ok, shape_info = False, {"error": str(exc), "radii": list(map(float, exc.radii))}
    r0_ok = shape_ok and (1 + eps - beta < shape_info["r0"] < 1.5)
    existence_ok = bool(rep.competitor_energy < 0.5 * w.far_value)
    rep.kind = "composite"
    rep.alpha, rep.beta, rep.power_s = alpha, beta, power_s
    rep.checks.update(shape_ok=shape_ok, r0_in_range_ok=r0_ok, existence_ok=existence_ok,
                      alpha_positive_ok=strict)
    rep.audit.update(shape=shape_info, far_value=w.far_value,
                     proof_chain=proof_chain_bounds(eps, alpha, beta, power_s, dim,
                                                    0.5 * eps))
    rep.passed = bool(rep.margin > slack and shape_ok and r0_ok and existence_ok and strict)
    return rep


def search_alpha_beta(eps: float, power_s: float, dim: int, alpha0: float = 0.1,
                      beta0: float | None = None, mode: str = "numeric",
                      quad: QuadratureSpec = DEFAULT_QUAD, search: SearchSpec = SearchSpec(),
                      grid_step: float = 1e-3, slack: float = DEFAULT_SLACK,
                      max_halvings: int = 60):
    """Halve ``alpha`` and ``beta`` together until the composite certificate passes.

    ``beta`` starts at ``eps/2`` so the ratio ``beta/alpha`` stays fixed.
    Returns ``(alpha, beta, report)`` for the largest passing pair tried.
    """
    e0 = epsilon0(dim)
    if not eps < e0:
        raise ValueError(f"eps={eps} must be below epsilon0({dim})={e0:.6g}")
    if not dim - 2 < power_s < dim:
        raise ValueError(f"power_s must lie in ({dim - 2}, {dim})")
    beta0 = 0.5 * eps if beta0 is None else beta0
    bound = radial_lower_bound(eps, dim, mode, quad, search)
    tried = []
    for k in range(max_halvings + 1):
        alpha, beta = alpha0 / 2 ** k, beta0 / 2 ** k
        if alpha < 1e-12:
            break
        try:
            rep = certify_composite(eps, alpha, beta, power_s, dim, mode, quad, search,
                                    grid_step, slack, bound)
        except ValueError as exc:
            raise SearchExhausted(
                f"stopped at alpha={alpha:.3g}, beta={beta:.3g}: {exc}; tried {tried}") from exc
        tried.append((alpha, beta, rep.margin))
        if rep.passed:
            rep.audit["search"] = {"tried": tried, "alpha0": alpha0, "beta0": beta0}
            return alpha, beta, rep
    raise SearchExhausted(f"no passing pair down to alpha={alpha:.3g}; tried {tried}")
