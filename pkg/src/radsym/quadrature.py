"""Gauss-Legendre quadrature: fixed composite rules and a batched adaptive driver.

The adaptive driver works on a flat list of panels, each tagged with the
index of the integral ("owner") it contributes to.  Many independent
integrals (e.g. one per (r, s) pair) are refined together, so the
integrand is always called on large arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class QuadratureError(RuntimeError):
    """Adaptive refinement did not reach the requested tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature policy shared by the radial-energy routines.

    method
        ``"gauss_phi"`` integrates in the angle between the two shell
        points; ``"gauss_t"`` integrates in the distance variable.
    panels
        Number of equal panels each breakpoint interval starts with.
    tol
        Target absolute error, relative to ``max(1, |integral|)``.
    order
        Gauss points per panel; the error estimate compares against a rule
        of half this order.
    """

    method: str = "gauss_phi"
    panels: int = 1
    tol: float = 1e-10
    order: int = 32
    max_rounds: int = 120

    def __post_init__(self):
        if self.method not in ("gauss_phi", "gauss_t"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.panels < 1:
            raise ValueError("panels must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.order < 4:
            raise ValueError("order must be >= 4")


DEFAULT_QUAD = QuadratureSpec()


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def fixed_gauss(f, a, b, n: int = 32) -> np.ndarray:
    """Apply the n-point rule to f on every interval [a_i, b_i].

    ``f`` receives an array of shape ``a.shape + (n,)`` and must return an
    array of the same shape.
    """
    x, w = gauss_legendre(n)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[..., None] + half[..., None] * x
    return half * (f(nodes) @ w)


def _panel_rule(f, lo, hi, own, order):
    x_hi, w_hi = gauss_legendre(order)
    x_lo, w_lo = gauss_legendre(order // 2)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = np.concatenate([x_hi, x_lo])
    vals = f(mid[:, None] + half[:, None] * nodes, own)
    vals = np.where(np.isnan(vals), np.inf, vals)
    fine = half * (vals[:, :order] @ w_hi)
    coarse = half * (vals[:, order:] @ w_lo)
    with np.errstate(invalid="ignore"):
        err = np.abs(fine - coarse)
    err = np.where(np.isfinite(err), err, np.inf)
    return fine, err


def adaptive_gauss(f, lo, hi, own, n_owners: int, tol: float = 1e-10,
                   order: int = 32, max_rounds: int = 120,
                   max_panels: int = 4_000_000, strict: bool = True):
    """Integrate many functions at once by adaptive panel bisection.

    Parameters
    ----------
    f : callable
        ``f(x, own)`` with ``x`` of shape (P, k) and ``own`` of shape (P,)
        giving the owner of each row; returns values shaped like ``x``.
    lo, hi : array_like
        Initial panel endpoints (flat).  Zero-width panels are dropped.
    own : array_like of int
        Owner index of each initial panel.
    n_owners : int
        Number of integrals being computed.
    tol : float
        An integral is accepted once its summed error estimate is below
        ``tol * max(1, |value|)``.
    strict : bool
        Raise :class:`QuadratureError` on non-convergence; otherwise the
        best estimate is returned together with its error.

    Returns
    -------
    values, errors : ndarray
        One entry per owner.
    """
    lo = np.asarray(lo, dtype=float).ravel()
    hi = np.asarray(hi, dtype=float).ravel()
    own = np.asarray(own, dtype=np.intp).ravel()
    keep = hi > lo
    lo, hi, own = lo[keep], hi[keep], own[keep]

    val, err = _panel_rule(f, lo, hi, own, order)
    for _ in range(max_rounds):
        total = np.bincount(own, weights=val, minlength=n_owners)
        total_err = np.bincount(own, weights=err, minlength=n_owners)
        with np.errstate(invalid="ignore"):
            scale = tol * np.maximum(1.0, np.abs(total))
            bad = ~(total_err <= scale)
        if not bad.any():
            return total, total_err
        counts = np.bincount(own, minlength=n_owners)
        split = bad[own] & (err * counts[own] >= scale[own])
        # always split the worst panel of each unconverged owner
        worst = np.full(n_owners, -1.0)
        np.maximum.at(worst, own, np.where(np.isfinite(err), err, 1e308))
        split |= bad[own] & (np.where(np.isfinite(err), err, 1e308) >= worst[own])
        if len(lo) + split.sum() > max_panels:
            break
        mid = 0.5 * (lo[split] + hi[split])
        c_lo = np.concatenate([lo[split], mid])
        c_hi = np.concatenate([mid, hi[split]])
        c_own = np.concatenate([own[split], own[split]])
        if np.any(c_hi <= c_lo):
            break
        c_val, c_err = _panel_rule(f, c_lo, c_hi, c_own, order)
        keep = ~split
        lo = np.concatenate([lo[keep], c_lo])
        hi = np.concatenate([hi[keep], c_hi])
        own = np.concatenate([own[keep], c_own])
        val = np.concatenate([val[keep], c_val])
        err = np.concatenate([err[keep], c_err])

    total = np.bincount(own, weights=val, minlength=n_owners)
    total_err = np.bincount(own, weights=err, minlength=n_owners)
    if strict:
        worst = int(np.nanargmax(total_err / np.maximum(1.0, np.abs(total))))
        raise QuadratureError(
            f"adaptive quadrature did not converge: owner {worst} has error "
            f"estimate {total_err[worst]:.3e} for value {total[worst]:.6e} "
            f"(tol {tol:g})")
    return total, total_err


def integrate(f, breakpoints, tol: float = 1e-10, order: int = 32,
              panels: int = 1, strict: bool = True) -> tuple[float, float]:
    """Adaptive integral of a vectorized scalar function.

    ``breakpoints`` is a sorted sequence whose first and last entries are
    the integration limits; interior entries start new panels.
    """
    edges = np.asarray(breakpoints, dtype=float)
    if panels > 1:
        edges = np.unique(np.concatenate(
            [np.linspace(a, b, panels + 1) for a, b in zip(edges[:-1], edges[1:])]))
    lo, hi = edges[:-1], edges[1:]
    val, err = adaptive_gauss(lambda x, _own: f(x), lo, hi,
                              np.zeros(len(lo), dtype=np.intp), 1,
                              tol=tol, order=order, strict=strict)
    return float(val[0]), float(err[0])
