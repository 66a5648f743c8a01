"""Lipschitz regularisation of functions on finite metric spaces.

Given f with non-decreasing modulus of continuity omega and a scale eps > 0,
``lipschitz_regularize`` returns a K-Lipschitz h with max |f - h| <= K eps,
where K = max(sup_{r >= eps} omega(r) / r, 1).  h is the lower envelope

    h(x) = min_n ( eps n + K d(x, X_n) ),   X_n = {f <= eps n}.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

METRIC_TOL = 1e-12


@dataclass(frozen=True)
class FiniteMetricSpace:
    points: tuple
    dist: np.ndarray

    def __post_init__(self):
        d = np.array(self.dist, dtype=float)
        n = len(self.points)
        if n == 0:
            raise ValueError("metric space is empty")
        if d.shape != (n, n):
            raise ValueError(f"distance matrix must be {n}x{n}")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise ValueError("distances must be finite and non-negative")
        if np.any(np.diag(d) != 0):
            raise ValueError("distance matrix must have zero diagonal")
        if not np.allclose(d, d.T, atol=0, rtol=0):
            raise ValueError("distance matrix must be symmetric")
        scale = max(1.0, float(d.max()))
        # d[i,k] <= d[i,j] + d[j,k] for all i, j, k
        via = (d[:, :, None] + d[None, :, :]).min(axis=1)
        if np.any(d > via + METRIC_TOL * scale):
            raise ValueError("distance matrix violates the triangle inequality")
        d.setflags(write=False)
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "dist", d)

    def __len__(self):
        return len(self.points)

    @classmethod
    def from_coordinates(cls, coords, metric: str = "linf") -> "FiniteMetricSpace":
        X = np.atleast_2d(np.asarray(coords, dtype=float))
        diff = np.abs(X[:, None, :] - X[None, :, :])
        if metric == "linf":
            d = diff.max(axis=-1)
        elif metric == "l1":
            d = diff.sum(axis=-1)
        elif metric == "l2":
            d = np.sqrt((diff**2).sum(axis=-1))
        else:
            raise ValueError(f"unknown metric {metric!r}")
        return cls(tuple(map(tuple, X.tolist())), d)

    def to_json(self) -> str:
        return json.dumps({"points": list(self.points), "matrix": self.dist.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "FiniteMetricSpace":
        doc = json.loads(text)
        pts = [tuple(p) if isinstance(p, list) else p for p in doc["points"]]
        return cls(tuple(pts), np.array(doc["matrix"], dtype=float))


@dataclass(frozen=True)
class ModulusSpec:
    """Piecewise-linear non-decreasing modulus through the knots (r_i, omega_i).

    The first knot must be (0, 0).  Beyond the last knot the table continues
    with its last slope.  Values may be ``inf``.
    """

    radii: tuple
    values: tuple

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        w = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != w.shape or len(r) < 1:
            raise ValueError("modulus table needs matching radii and values")
        if r[0] != 0 or w[0] != 0:
            raise ValueError("modulus table must start at (0, 0)")
        if np.any(np.diff(r) <= 0):
            raise ValueError("modulus radii must be strictly increasing")
        if np.any(np.diff(w) < 0):
            raise ValueError("modulus must be non-decreasing")
        object.__setattr__(self, "radii", tuple(float(v) for v in r))
        object.__setattr__(self, "values", tuple(float(v) for v in w))

    @property
    def last_slope(self) -> float:
        if len(self.radii) < 2:
            return 0.0
        r0, r1 = self.radii[-2:]
        w0, w1 = self.values[-2:]
        if math.isinf(w1):
            return math.inf
        return (w1 - w0) / (r1 - r0)

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        rad, val = np.array(self.radii), np.array(self.values)
        with np.errstate(invalid="ignore"):
            inner = np.interp(r, rad, val)
            tail = val[-1] + self.last_slope * (r - rad[-1])
        return np.where(r > rad[-1], tail, inner)

    def lipschitz_scale(self, eps: float) -> float:
        """K = max(sup_{r >= eps} omega(r)/r, 1).

        On each linear piece omega(r)/r is monotone, so the supremum is
        attained at eps, at a knot, or approached along the final ray.
        """
        cand = [r for r in self.radii if r >= eps] + [eps]
        ratios = [float(self(r)) / r for r in cand]
        ratios.append(self.last_slope)
        k1 = max(ratios)
        return max(k1, 1.0)

    def to_json(self) -> str:
        return json.dumps({"knots": [[r, w] for r, w in zip(self.radii, self.values)]})

    @classmethod
    def from_json(cls, text: str) -> "ModulusSpec":
        knots = json.loads(text)["knots"]
        return cls(tuple(k[0] for k in knots), tuple(k[1] for k in knots))


def modulus_of(space: FiniteMetricSpace, f) -> ModulusSpec:
    """Smallest piecewise-linear table dominating the true modulus of f."""
    f = np.asarray(f, dtype=float)
    d = space.dist
    radii = np.unique(d[d > 0])
    osc = np.abs(f[:, None] - f[None, :])
    vals = [float(osc[d <= r].max()) for r in radii]
    if len(radii) == 0:
        return ModulusSpec((0.0,), (0.0,))
    vals = np.maximum.accumulate(vals)
    # constant continuation past the diameter
    return ModulusSpec((0.0,) + tuple(radii) + (float(radii[-1]) + 1.0,),
                       (0.0,) + tuple(vals) + (float(vals[-1]),))


class Regularized(NamedTuple):
    h: np.ndarray
    K: float
    lipschitz: float
    sup_error: float


def lipschitz_regularize(space: FiniteMetricSpace, f: Sequence[float],
                         omega: ModulusSpec, eps: float) -> Regularized:
    """K-Lipschitz approximation h of f with ||f - h||_inf <= K eps.

    Raises ``ValueError`` when K is infinite and ``ArithmeticError`` if
    either guarantee fails on the finite space (which happens only when f's
    true modulus exceeds ``omega``).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    f = np.asarray(f, dtype=float)
    if f.shape != (len(space),):
        raise ValueError("need one function value per point")
    if not np.all(np.isfinite(f)):
        raise ValueError("function values must be finite")
    K = omega.lipschitz_scale(eps)
    if not math.isfinite(K):
        raise ValueError("Lipschitz scale K is infinite for this modulus and eps")
    d = space.dist
    lo = math.floor(f.min() / eps) - 1
    hi = math.ceil(f.max() / eps) + 1
    h = np.full(len(f), np.inf)
    for n in range(lo, hi + 1):
        inside = f <= eps * n
        if not inside.any():
            continue
        dist_to = d[:, inside].min(axis=1)
        h = np.minimum(h, eps * n + K * dist_to)
    diff = np.abs(h[:, None] - h[None, :])
    off = d > 0
    lip = float((diff[off] / d[off]).max()) if off.any() else 0.0
    err = float(np.abs(f - h).max())
    tol = 1e-12 * max(1.0, float(np.abs(f).max()), K)
    if np.any(diff > K * d + tol):
        raise ArithmeticError(f"regularised function is not {K}-Lipschitz")
    if err > K * eps + tol:
        raise ArithmeticError("sup error exceeds K*eps; is omega really a modulus of f?")
    return Regularized(h, K, lip, err)
