"""Energies of radial measures through the shell-distance kernel.

For shells of radii ``r`` and ``s`` in R^d, the distance ``t = |x - y|``
between independent uniform points has density ``K_{r,s}(t)`` on
``(|r - s|, r + s)``.  The shell-pair energy is ``W~(r, s) = int K w dt``.
Writing ``t`` through the angle ``theta`` between the two points turns
this into ``c_d int_0^pi w(t(theta)) sin^(d-2)(theta) d theta`` with
``c_d = |S^(d-2)| / |S^(d-1)|``; that form has no endpoint singularity
and is what the default quadrature integrates.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import betainc, gammaln

from .measures import RadialProfile, validate_profile
from .potential import PrototypePotential, RadialPotential
from .quadrature import DEFAULT_QUAD, QuadratureSpec, adaptive_gauss


class SearchInconclusive(RuntimeError):
    """The supremum search could not be closed by its tail bound."""


def surface_area(n: int) -> float:
    """Area of the unit sphere S^n in R^(n+1): 2 pi^((n+1)/2) / Gamma((n+1)/2)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    h = 0.5 * (n + 1)
    return float(np.exp(np.log(2.0) + h * np.log(np.pi) - gammaln(h)))


def ball_volume(dim: int) -> float:
    return surface_area(dim - 1) / dim


def shell_ratio(dim: int) -> float:
    """``|S^(dim-2)| / |S^(dim-1)|``."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    return surface_area(dim - 2) / surface_area(dim - 1)


# ---------------------------------------------------------------------------
# kernel

def _half_angle_squares(r, s, t):
    # sin^2 and cos^2 of theta/2, each a product of differences so that
    # neither loses digits at the ends of the support
    lo, hi = np.abs(r - s), r + s
    d = 4.0 * r * s
    sn2 = np.clip((t - lo) * (t + lo) / d, 0.0, 1.0)
    cs2 = np.clip((hi - t) * (hi + t) / d, 0.0, 1.0)
    return sn2, cs2


def angle_of_distance(r, s, t):
    """Angle between shell points at radii r, s that are distance t apart."""
    sn2, cs2 = _half_angle_squares(r, s, t)
    return 2.0 * np.arctan2(np.sqrt(sn2), np.sqrt(cs2))


def distance_of_angle(r, s, theta):
    return np.sqrt((r - s) ** 2 + 4.0 * r * s * np.sin(0.5 * theta) ** 2)


def kernel_eval(r, s, t, dim: int):
    """Density of ``|x - y|`` for x, y uniform on spheres of radii r, s.

    Returns ``inf`` at the support endpoints when ``dim == 2``.
    """
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(r <= 0) or np.any(s <= 0):
        raise ValueError("kernel requires r, s > 0")
    lo, hi = np.abs(r - s), r + s
    inside = (t > lo) & (t < hi)
    sn2, cs2 = _half_angle_squares(r, s, t)
    base = 4.0 * sn2 * cs2           # 1 - cos^2
    with np.errstate(divide="ignore"):
        val = shell_ratio(dim) * base ** (0.5 * (dim - 3)) * t / (r * s)
    edge = ((t == lo) | (t == hi)) & (dim == 2)
    return np.where(inside, val, np.where(edge, np.inf, 0.0))


def cap_fraction(theta, dim: int):
    """Fraction of a sphere in R^dim within polar angle ``theta`` of a pole.

    Equals ``c_d int_0^theta sin^(d-2)``; evaluated through the regularized
    incomplete beta function.
    """
    theta = np.asarray(theta, dtype=float)
    half = 0.5 * betainc(0.5 * (dim - 1), 0.5, np.sin(theta) ** 2)
    return np.where(theta <= 0.5 * np.pi, half, 1.0 - half)


def _t_to_u(r, s, t):
    # t = |r-s| + (r+s-|r-s|) sin^2(u/2), u in [0, pi]
    lo, hi = np.abs(r - s), r + s
    return 2.0 * np.arcsin(np.sqrt(np.clip((t - lo) / (hi - lo), 0.0, 1.0)))


def _kernel_du(r, s, u, dim):
    """``K_{r,s}(t) dt/du`` in the distance variable stretched by
    ``t = |r-s| + 2 min(r,s) (1 - cos u)``.

    The substitution cancels the inverse square-root endpoint behaviour of
    the planar kernel; the factors ``t - lo`` and ``hi - t`` are formed
    from ``u`` directly so no cancellation occurs near the ends.
    """
    lo, hi = np.abs(r - s), r + s
    h = 0.5 * (hi - lo)
    sn, cs = np.sin(0.5 * u), np.cos(0.5 * u)
    t = lo + 2 * h * sn * sn
    below = 2 * h * sn * sn          # t - lo
    above = 2 * h * cs * cs          # hi - t
    dtdu = 2 * h * sn * cs
    with np.errstate(divide="ignore", invalid="ignore"):
        if dim == 2:
            # (1 - c^2)^(-1/2) = 2rs / sqrt(below above (t+lo) (hi+t)); sqrt(below above) = dtdu
            val = 2 * r * s / np.sqrt((t + lo) * (hi + t)) * (t / (r * s))
        else:
            base = below * (t + lo) * above * (hi + t) / (2 * r * s) ** 2
            val = base ** (0.5 * (dim - 3)) * (t / (r * s)) * dtdu
    return shell_ratio(dim) * val


def _broadcast_flat(*arrays):
    arrs = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in arrays])
    return arrs[0].shape, [a.ravel().copy() for a in arrs]


def _split_panels(edges, panels):
    """Rows of sorted edges -> flat (lo, hi, owner) with each gap cut in ``panels``."""
    n, m = edges.shape
    lo, hi = edges[:, :-1], edges[:, 1:]
    if panels > 1:
        frac = np.arange(panels) / panels
        width = (hi - lo)[..., None]
        lo, hi = (lo[..., None] + width * frac).reshape(n, -1), \
                 (lo[..., None] + width * (frac + 1.0 / panels)).reshape(n, -1)
    own = np.repeat(np.arange(n), lo.shape[1])
    return lo.ravel(), hi.ravel(), own


def kernel_partial_integral(r, s, a, b, dim: int, quad: QuadratureSpec = DEFAULT_QUAD):
    """``int_a^b K_{r,s}(t) dt`` (vectorized over r, s, a, b)."""
    shape, (r, s, a, b) = _broadcast_flat(r, s, a, b)
    if np.any(r <= 0) or np.any(s <= 0):
        raise ValueError("kernel requires r, s > 0")
    if np.any(a > b):
        raise ValueError("need a <= b")
    lo_t = np.maximum(a, np.abs(r - s))
    hi_t = np.minimum(b, r + s)
    active = hi_t > lo_t
    out = np.zeros_like(r)
    if not active.any():
        return out.reshape(shape)
    idx = np.flatnonzero(active)
    rr, ss = r[idx], s[idx]
    c = shell_ratio(dim)
    if quad.method == "gauss_phi":
        th_lo = angle_of_distance(rr, ss, lo_t[idx])
        th_hi = angle_of_distance(rr, ss, hi_t[idx])
        lo, hi, own = _split_panels(np.stack([th_lo, th_hi], axis=1), quad.panels)
        f = lambda x, o: c * np.sin(x) ** (dim - 2)
    else:
        u_lo = _t_to_u(rr, ss, lo_t[idx])
        u_hi = _t_to_u(rr, ss, hi_t[idx])
        lo, hi, own = _split_panels(np.stack([u_lo, u_hi], axis=1), quad.panels)
        f = lambda x, o: _kernel_du(rr[o][:, None], ss[o][:, None], x, dim)
    val, _ = adaptive_gauss(f, lo, hi, own, len(idx), tol=quad.tol,
                            order=quad.order, max_rounds=quad.max_rounds)
    out[idx] = val
    return out.reshape(shape)


# ---------------------------------------------------------------------------
# shell-pair energy

def tilde_w(p: RadialPotential, r, s, dim: int, quad: QuadratureSpec = DEFAULT_QUAD,
            strict: bool = True):
    """Shell-pair energy ``W~(r, s)`` (vectorized over r and s).

    ``W~(r, 0) = w(r)``.  For potentials with an ``r**-s`` singularity and
    ``s >= dim - 1`` the self-energy ``W~(r, r)`` is infinite.
    """
    shape, (r, s) = _broadcast_flat(r, s)
    if np.any(r < 0) or np.any(s < 0):
        raise ValueError("radii must be nonnegative")
    big, small = np.maximum(r, s), np.minimum(r, s)
    out = np.empty_like(big)

    # a shell so small that r*s underflows acts as the origin
    degenerate = (small == 0) | (small * big < np.finfo(float).tiny)
    if degenerate.any():
        bd = big[degenerate]
        vals = np.full(bd.shape, np.inf)
        ok = (bd > 0) | (not p.singular_at_origin)
        if ok.any():
            vals[ok] = p(bd[ok])
        out[degenerate] = vals

    rest = ~degenerate
    if p.singular_at_origin and p.singular_power >= dim - 1:
        selfpair = rest & (big == small)
        out[selfpair] = np.inf
        rest &= ~selfpair
    if not rest.any():
        return out.reshape(shape)

    idx = np.flatnonzero(rest)
    R, S = big[idx], small[idx]
    bps = np.asarray(sorted(p.breakpoints()), dtype=float)
    c = shell_ratio(dim)
    if quad.method == "gauss_phi":
        inner = np.empty((len(idx), len(bps)))
        for k, b in enumerate(bps):
            inner[:, k] = np.where((b > R - S) & (b < R + S),
                                   angle_of_distance(R, S, b), 0.0)
        edges = np.sort(np.column_stack([np.zeros(len(idx)), inner,
                                         np.full(len(idx), np.pi)]), axis=1)

        def f(x, o):
            t = distance_of_angle(R[o][:, None], S[o][:, None], x)
            return c * p(t) * np.sin(x) ** (dim - 2)
    else:
        inner = np.clip(np.broadcast_to(bps, (len(idx), len(bps))),
                        (R - S)[:, None], (R + S)[:, None])
        edges = np.sort(np.column_stack([np.zeros(len(idx)),
                                         _t_to_u(R[:, None], S[:, None], inner),
                                         np.full(len(idx), np.pi)]), axis=1)

        def f(x, o):
            Ro, So = R[o][:, None], S[o][:, None]
            t = (Ro - So) + 2 * So * np.sin(0.5 * x) ** 2
            return _kernel_du(Ro, So, x, dim) * p(t)

    lo, hi, own = _split_panels(edges, quad.panels)
    val, _ = adaptive_gauss(f, lo, hi, own, len(idx), tol=quad.tol, order=quad.order,
                            max_rounds=quad.max_rounds, strict=strict)
    out[idx] = val
    return out.reshape(shape)


def uniform_sphere(n: int, dim: int, rng) -> np.ndarray:
    g = rng.standard_normal((n, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def tilde_w_mc_oracle(p: RadialPotential, r: float, s: float, dim: int,
                      n_samples: int = 100_000, seed: int = 0,
                      chunk: int = 1 << 16) -> tuple[float, float]:
    """Monte Carlo estimate of ``W~(r, s)`` and its standard error.

    One point is pinned at ``r e_1`` (rotation invariance); the other is
    sampled uniformly on the sphere of radius ``s``.  Chunks are reduced
    in a fixed order, so the result depends only on ``seed``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if r == 0 or s == 0:
        return float(p(np.array(max(r, s)))), 0.0
    rng = np.random.default_rng(seed)
    x = np.zeros(dim)
    x[0] = r
    count, mean, m2 = 0, 0.0, 0.0
    remaining = n_samples
    while remaining > 0:
        k = min(chunk, remaining)
        y = s * uniform_sphere(k, dim, rng)
        v = p(np.linalg.norm(x - y, axis=1))
        cm = v.mean()
        cm2 = float(((v - cm) ** 2).sum())
        delta = cm - mean
        tot = count + k
        mean += delta * k / tot
        m2 += cm2 + delta * delta * count * k / tot
        count = tot
        remaining -= k
    var = m2 / (count - 1) if count > 1 else 0.0
    return float(mean), float(np.sqrt(var / count))


def radial_energy(p: RadialPotential, profile: RadialProfile, dim: int,
                  quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``(1/2) sum_ij w_i w_j W~(r_i, r_j)`` for a shell profile."""
    if not validate_profile(profile):
        raise ValueError("invalid radial profile")
    rad, w = profile.radii, profile.weights
    i, j = np.triu_indices(len(rad))
    pair = tilde_w(p, rad[i], rad[j], dim, quad)
    mult = np.where(i == j, 1.0, 2.0)
    return 0.5 * float(np.sum(mult * w[i] * w[j] * pair))


# ---------------------------------------------------------------------------
# supremum of the partial kernel integral

@dataclass(frozen=True)
class SearchSpec:
    """Grid search controls for :func:`kernel_sup`."""

    coarse_step: float = 0.01
    s_max: float = 5.0
    refine_rounds: int = 3
    refine_factor: int = 10
    refine_halfwidth: int = 20
    ridge_step: float = 1e-4
    max_doublings: int = 8


@dataclass
class KernelSupResult:
    eps: float
    dim: int
    sup_value: float
    raw_max: float
    safety_margin: float
    argmax: tuple
    s_max: float
    tail_bound: float
    final_cell: float
    n_evaluations: int
    coarse_shape: tuple

    def to_dict(self):
        return asdict(self)


def kernel_window(eps):
    return 1.0 - eps, 1.0 + eps


def _tail_bound(eps, dim, s_max):
    """Bound on the partial integral for all pairs with s >= s_max."""
    rs = s_max * s_max
    if dim == 2:
        if rs <= 2 * eps:
            return np.inf
        return 2 * np.sqrt(2) / np.pi * np.sqrt(eps) / np.sqrt(rs)
    return shell_ratio(dim) * 2 * eps / rs


def kernel_sup(eps: float, dim: int, quad: QuadratureSpec = DEFAULT_QUAD,
               search: SearchSpec = SearchSpec()) -> KernelSupResult:
    """Numerical supremum of ``int_{1-eps}^{1+eps} K_{r,s}`` over
    ``r >= s >= (1 - eps)/2``.

    The search runs on a coarse grid in (s, r - s), adds dense samples
    along the curves ``r +- s = 1 +- eps`` where the integral has kinks,
    then zooms in around the incumbent.  The reported value is inflated by
    the largest change to any neighbour at the final spacing.  The region
    is truncated at ``s <= s_max``; ``s_max`` is doubled until the analytic
    tail bound drops below the incumbent.  The result never exceeds 1.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    a, b = kernel_window(eps)
    s_lo = 0.5 * (1 - eps)
    width = 1 + eps
    n_eval = 0

    def F(s, d):
        nonlocal n_eval
        s = np.asarray(s, dtype=float)
        d = np.asarray(d, dtype=float)
        n_eval += s.size
        return kernel_partial_integral(s + d, s, a, b, dim, quad)

    s_max = search.s_max
    for _ in range(search.max_doublings + 1):
        ns = int(np.ceil((s_max - s_lo) / search.coarse_step)) + 1
        nd = int(np.ceil(width / search.coarse_step)) + 1
        sg, dg = np.meshgrid(np.linspace(s_lo, s_max, ns), np.linspace(0.0, width, nd),
                             indexing="ij")
        vals = F(sg, dg)
        best = float(vals.max())
        tail = _tail_bound(eps, dim, s_max)
        if tail < best:
            break
        s_max *= 2
    else:
        raise SearchInconclusive(
            f"tail bound {tail:.4g} still above incumbent {best:.4g} at s_max={s_max}")
    k = np.unravel_index(np.argmax(vals), vals.shape)
    cand_s, cand_d, cand_v = [sg[k]], [dg[k]], [best]

    # kink curves r + s = 1 +- eps and r - s = 1 +- eps
    ss = np.arange(s_lo, s_max, search.ridge_step)
    for target in (a, b):
        for kind in ("sum", "diff"):
            d = (target - 2 * ss) if kind == "sum" else np.full_like(ss, target)
            ok = (d >= 0) & (d <= width)
            if ok.any():
                v = F(ss[ok], d[ok])
                j = int(np.argmax(v))
                cand_s.append(ss[ok][j])
                cand_d.append(d[ok][j])
                cand_v.append(float(v[j]))
    j = int(np.argmax(cand_v))
    s0, d0, best = cand_s[j], cand_d[j], cand_v[j]

    h = search.coarse_step
    m = search.refine_halfwidth
    for _ in range(search.refine_rounds):
        h /= search.refine_factor
        off = np.arange(-m, m + 1) * h
        sg, dg = np.meshgrid(s0 + off, d0 + off, indexing="ij")
        ok = (sg >= s_lo) & (dg >= 0) & (dg <= width)
        v = np.full(sg.shape, -np.inf)
        v[ok] = F(sg[ok], dg[ok])
        k = np.unravel_index(np.argmax(v), v.shape)
        if v[k] > best:
            s0, d0, best = sg[k], dg[k], float(v[k])

    # Lipschitz-style inflation from the neighbours at the final spacing
    nb = np.array([(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1) if (i, j) != (0, 0)])
    ns_, nd_ = s0 + nb[:, 0] * h, d0 + nb[:, 1] * h
    nv = F(np.maximum(ns_, s_lo), np.clip(nd_, 0.0, width))
    margin = float(np.max(np.abs(nv - best)))
    best = max(best, float(nv.max()))
    # the integrand is a probability density, so 1 is always an upper bound
    return KernelSupResult(eps=eps, dim=dim, sup_value=min(best + margin, 1.0), raw_max=best,
                           safety_margin=margin, argmax=(float(s0 + d0), float(s0)),
                           s_max=float(s_max), tail_bound=float(tail), final_cell=h,
                           n_evaluations=n_eval, coarse_shape=(ns, nd))


def krs_analytic_bound(eps: float, dim: int) -> float:
    """Closed-form upper bound on the supremum searched by :func:`kernel_sup`.

    ``(22 sqrt2 / (5 pi)) sqrt(eps)`` in the plane (valid for eps <= 1/11),
    ``c_d 8 eps / (1 - eps)^2`` for dim >= 3.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if dim == 2:
        if not 0 < eps <= 1 / 11:
            raise ValueError(f"planar bound needs 0 < eps <= 1/11, got {eps}")
        return 22 * np.sqrt(2) / (5 * np.pi) * np.sqrt(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return shell_ratio(dim) * 8 * eps / (1 - eps) ** 2


@dataclass
class BoundReport:
    eps: float
    dim: int
    c0: float
    sup_value: float
    analytic_bound: float | None
    lower_bound: float
    method: str
    audit: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def lower_bound_from_c0(c0: float) -> float:
    """``-1 / (4 (1 - c0))``: energy floor over radial measures."""
    return -1.0 / (4.0 * (1.0 - c0))


def radial_lower_bound(eps: float, dim: int, mode: str = "numeric",
                       quad: QuadratureSpec = DEFAULT_QUAD,
                       search: SearchSpec = SearchSpec()) -> BoundReport:
    """Lower bound on the prototype energy over all radial probability measures."""
    try:
        analytic = krs_analytic_bound(eps, dim)
    except ValueError:
        if mode == "analytic":
            raise
        analytic = None
    audit = {}
    if mode == "analytic":
        sup_value = analytic
    elif mode == "numeric":
        res = kernel_sup(eps, dim, quad, search)
        sup_value = res.sup_value
        audit = res.to_dict()
    else:
        raise ValueError(f"unknown mode {mode!r}")
    c0 = 0.5 * sup_value
    if c0 >= 1:
        raise ValueError("c0 >= 1: no finite lower bound")
    return BoundReport(eps=eps, dim=dim, c0=c0, sup_value=sup_value,
                       analytic_bound=analytic, lower_bound=lower_bound_from_c0(c0),
                       method=mode, audit=audit)


# ---------------------------------------------------------------------------
# averages over balls

def _ball_average_origin(w1, x, eta, dim, quad):
    # shells about the origin: the sphere of radius rho meets B(x, eta) in
    # a cap whose area fraction is cap_fraction(angle).  Shells fully inside
    # the ball (rho < eta - x) are integrated in rho; the cap range
    # |x - eta| < rho < x + eta is stretched like the kernel so the square
    # root behaviour of the cap fraction at its ends is removed.
    n = len(x)
    bps = np.asarray(sorted(w1.breakpoints()), dtype=float)
    tol = quad.tol * eta ** dim / dim
    total = np.zeros(n)

    inside = np.flatnonzero(x < eta)
    if inside.size:
        top = eta - x[inside]
        inner = np.clip(np.broadcast_to(bps, (inside.size, len(bps))), 0.0, top[:, None])
        edges = np.sort(np.column_stack([np.zeros(inside.size), inner, top]), axis=1)
        lo, hi, own = _split_panels(edges, quad.panels)
        f = lambda rho, o: rho ** (dim - 1) * w1(rho)
        val, _ = adaptive_gauss(f, lo, hi, own, inside.size, tol=tol,
                                order=quad.order, max_rounds=quad.max_rounds)
        total[inside] += val

    cap = np.flatnonzero(x > 0)
    if cap.size:
        xc = x[cap]
        lo_r, hi_r = np.abs(xc - eta), xc + eta
        u_bp = _t_to_u(xc[:, None], eta, np.clip(bps, lo_r[:, None], hi_r[:, None]))
        edges = np.sort(np.column_stack([np.zeros(cap.size), u_bp, np.full(cap.size, np.pi)]),
                        axis=1)
        lo, hi, own = _split_panels(edges, quad.panels)

        def g(u, o):
            a, b = lo_r[o][:, None], hi_r[o][:, None]
            sn, cs = np.sin(0.5 * u), np.cos(0.5 * u)
            rho = a + (b - a) * sn * sn
            frac = cap_fraction(angle_of_distance(xc[o][:, None], rho, eta), dim)
            return rho ** (dim - 1) * w1(rho) * frac * (b - a) * sn * cs

        val, _ = adaptive_gauss(g, lo, hi, own, cap.size, tol=tol,
                                order=quad.order, max_rounds=quad.max_rounds)
        total[cap] += val
    return total * dim / eta ** dim


def _ball_average_center(w1, x, eta, dim, quad):
    # shells about the ball centre, each averaged with the shell-pair energy
    n = len(x)
    bps = np.asarray(sorted(w1.breakpoints()), dtype=float)
    cand = np.column_stack([np.abs(x[:, None] - bps), x[:, None] + bps, x[:, None]])
    inner = np.clip(cand, 0.0, eta)
    edges = np.sort(np.column_stack([np.zeros(n), inner, np.full(n, eta)]), axis=1)
    lo, hi, own = _split_panels(edges, quad.panels)

    def f(t, o):
        xo = np.broadcast_to(x[o][:, None], t.shape)
        return t ** (dim - 1) * tilde_w(w1, xo, t, dim, quad)

    val, _ = adaptive_gauss(f, lo, hi, own, n, tol=quad.tol * eta ** dim / dim,
                            order=quad.order, max_rounds=quad.max_rounds)
    return val * dim / eta ** dim


def ball_average(w1: RadialPotential, x_norm, eta: float, dim: int,
                 quad: QuadratureSpec = DEFAULT_QUAD, method: str = "origin_shells"):
    """Mean of the radial function ``w1`` over the ball ``B(x, eta)``, ``|x| = x_norm``.

    ``method="origin_shells"`` integrates over spheres centred at the origin
    weighted by the fraction of each sphere inside the ball;
    ``method="center_shells"`` integrates ``t^(d-1) W~1(|x|, t)`` over
    spheres centred at ``x``.  Both are exact representations; the first
    is much cheaper.
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    shape, (x,) = _broadcast_flat(x_norm)
    if np.any(x < 0):
        raise ValueError("x_norm must be nonnegative")
    if method == "origin_shells":
        out = _ball_average_origin(w1, x, eta, dim, quad)
    elif method == "center_shells":
        out = _ball_average_center(w1, x, eta, dim, quad)
    else:
        raise ValueError(f"unknown method {method!r}")
    return out.reshape(shape) if shape else float(out[0])

