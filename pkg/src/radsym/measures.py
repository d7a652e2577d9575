"""Competitor measures and radial shell profiles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted Dirac masses in R^dim."""

    positions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        if pos.shape[0] != w.shape[0]:
            raise ValueError("one weight per atom required")
        if pos.shape[1] < 1 or not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite d-vectors")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self):
        return self.positions.shape[1]

    def __len__(self):
        return len(self.weights)


@dataclass(frozen=True)
class MollifiedBallMeasure:
    """Uniform densities on balls of radius ``eta`` around ``centers``."""

    centers: np.ndarray
    eta: float
    weights: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        if c.shape[0] != w.shape[0]:
            raise ValueError("one weight per ball required")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self):
        return self.centers.shape[1]


@dataclass(frozen=True)
class RadialProfile:
    """Radial measure ``sum_i w_i delta_(r_i)``, with ``delta_(r)`` the
    uniform probability on the sphere of radius ``r`` (a point mass at the
    origin when ``r = 0``)."""

    radii: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "radii", np.asarray(self.radii, dtype=float).ravel())
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float).ravel())
        if self.radii.shape != self.weights.shape:
            raise ValueError("one weight per shell required")

    @classmethod
    def from_nodes(cls, nodes):
        nodes = np.asarray(nodes, dtype=float).reshape(-1, 2)
        return cls(nodes[:, 0], nodes[:, 1])


def validate_profile(profile: RadialProfile) -> bool:
    """True iff weights are positive and sum to 1 (within 1e-12) and radii >= 0."""
    w, r = profile.weights, profile.radii
    return bool(len(w) > 0 and np.all(w > 0) and abs(w.sum() - 1.0) <= 1e-12
                and np.all(r >= 0))


def unit_simplex_vertices(dim: int) -> np.ndarray:
    """Vertices of a regular simplex with unit edges, centred at the origin.

    Built one vertex at a time: vertex k sits on the k-th axis above the
    centroid of the first k vertices, at the height that makes its distance
    to them equal to 1.  Returns an array of shape (dim + 1, dim).
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    v = np.zeros((dim + 1, dim))
    v[1, 0] = 1.0
    for k in range(2, dim + 1):
        centroid = v[:k].mean(axis=0)
        # circumradius of the unit (k-1)-simplex: sqrt((k-1) / (2k))
        rho2 = (k - 1) / (2.0 * k)
        v[k] = centroid
        v[k, k - 1] = np.sqrt(1.0 - rho2)
    return v - v.mean(axis=0)


def rho_star_eta(dim: int, eta: float = 0.0):
    """Simplex competitor: Diracs (eta = 0) or uniform balls of radius eta."""
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    centers = unit_simplex_vertices(dim)
    weights = np.full(dim + 1, 1.0 / (dim + 1))
    if eta == 0:
        return DiscreteMeasure(centers, weights)
    return MollifiedBallMeasure(centers, float(eta), weights)


def sample_balls(measure: MollifiedBallMeasure, index: int, n: int, rng) -> np.ndarray:
    """n uniform points in ball ``index`` of a mollified measure."""
    d = measure.dim
    g = rng.standard_normal((n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = measure.eta * rng.random(n) ** (1.0 / d)
    return measure.centers[index] + g * rad[:, None]
