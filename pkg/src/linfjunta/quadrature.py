"""Quadrature, sampling and black-box function handles.

Functions on T^N (``domain="torus"``) or [0,1]^N (``domain="cube"``) are
wrapped in :class:`FnHandle`.  Integrals use either a midpoint tensor grid or
plain Monte-Carlo driven by a counter-based (Philox) generator, so results are
a deterministic function of ``(seed, count)``.

Every estimator returns an :class:`Estimate` ``(value, half_width)``.  For
Monte-Carlo the half-width is a 99% normal confidence half-width; for grids it
is the change against the half-resolution grid (a refinement estimate).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, NamedTuple, Optional

import numpy as np

from .torus import TrigPoly, coord_set, gradient, grid_values

Z99 = 2.5758293035489004
DEFAULT_STEP = 1e-4


class Estimate(NamedTuple):
    value: float
    half_width: float


class LipschitzEstimate(NamedTuple):
    value: float
    mesh: float


@dataclass(frozen=True)
class QuadratureSpec:
    """How to integrate: ``scheme`` is ``"grid"`` or ``"mc"``.

    ``count`` is the number of points per axis for a grid and the number of
    samples for Monte-Carlo.
    """

    scheme: str = "grid"
    count: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.scheme not in ("grid", "mc"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if int(self.count) < 1:
            raise ValueError("quadrature count must be >= 1")
        if not -(2**63) <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")

    @classmethod
    def default(cls, dim: int, seed: int = 0) -> "QuadratureSpec":
        if dim <= 3:
            return cls("grid", 64, seed)
        return cls("mc", 2**16, seed)

    @classmethod
    def grid(cls, points_per_axis: int = 64, seed: int = 0) -> "QuadratureSpec":
        return cls("grid", points_per_axis, seed)

    @classmethod
    def mc(cls, samples: int = 2**16, seed: int = 0) -> "QuadratureSpec":
        return cls("mc", samples, seed)

    @classmethod
    def grid_for(cls, dim: int, budget: int = 2**20, seed: int = 0,
                 max_per_axis: int = 64) -> "QuadratureSpec":
        """Tensor grid with at most ``budget`` nodes (even count per axis)."""
        m = int(math.floor(budget ** (1.0 / dim) + 1e-9))
        m = max(2, min(max_per_axis, m - m % 2))
        return cls("grid", m, seed)

    @property
    def points_per_axis(self) -> int:
        return self.count

    @property
    def samples(self) -> int:
        return self.count

    @property
    def mesh(self) -> float:
        return 1.0 / self.count if self.scheme == "grid" else float("nan")

    def axis_nodes(self) -> np.ndarray:
        if self.scheme != "grid":
            raise ValueError("axis nodes only exist for grid quadrature")
        return (np.arange(self.count) + 0.5) / self.count

    def coarse(self) -> Optional["QuadratureSpec"]:
        if self.scheme != "grid" or self.count < 2:
            return None
        return replace(self, count=self.count // 2)

    def scaled(self, factor: float, dim: int) -> "QuadratureSpec":
        """Same scheme with ``factor`` times as many nodes in total."""
        if self.scheme == "mc":
            return replace(self, count=int(math.ceil(self.count * factor)))
        m = int(math.ceil(self.count * factor ** (1.0 / dim)))
        return replace(self, count=m + m % 2)

    def to_dict(self) -> dict:
        return {"scheme": self.scheme, "count": self.count, "seed": self.seed}


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator; distinct ``stream`` values give independent draws."""
    return np.random.Generator(np.random.Philox(key=[int(seed) % 2**64, int(stream) % 2**64]))


def nodes(quad: QuadratureSpec, dim: int) -> np.ndarray:
    """Quadrature nodes as an array of shape (count, dim)."""
    if quad.scheme == "mc":
        return rng_for(quad.seed).random((quad.count, dim))
    ax = quad.axis_nodes()
    mesh = np.meshgrid(*([ax] * dim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


@dataclass(frozen=True)
class FnHandle:
    """A real function on T^dim or [0,1]^dim.

    ``evaluator`` maps an array of points (P, dim) to values (P,).  The
    optional ``gradient`` maps (P, dim) to (P, dim).  ``grid_evaluator``, when
    present, evaluates on a tensor grid given one node array per axis.
    """

    dim: int
    domain: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""
    grid_evaluator: Optional[Callable[[list], np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.domain not in ("torus", "cube"):
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, self.dim)
        out = np.asarray(self.evaluator(flat), dtype=float).reshape(x.shape[:-1])
        return out

    def on_grid(self, axes) -> np.ndarray:
        """Values on a tensor grid, shape (len(axes[0]), ..., len(axes[-1]))."""
        if self.grid_evaluator is not None:
            return np.asarray(self.grid_evaluator(list(axes)), dtype=float)
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        return self(pts).reshape(mesh[0].shape)

    def check_periodic(self, samples: int = 32, seed: int = 0, atol: float = 1e-9) -> bool:
        """Spot-check 1-periodicity in every coordinate (torus handles only)."""
        if self.domain != "torus":
            return True
        rng = rng_for(seed, 7)
        x = rng.random((samples, self.dim))
        shift = rng.integers(-2, 3, size=(samples, self.dim)).astype(float)
        return bool(np.allclose(self(x), self(x + shift), atol=atol))


def as_handle(obj) -> FnHandle:
    """Wrap a :class:`TrigPoly` as a torus handle (handles pass through)."""
    if isinstance(obj, FnHandle):
        return obj
    if isinstance(obj, TrigPoly):
        return trigpoly_handle(obj)
    raise TypeError(f"cannot use {type(obj).__name__} as a function handle")


def trigpoly_handle(f: TrigPoly) -> FnHandle:
    grads = gradient(f)

    def grad(X):
        return np.stack([g(X) for g in grads], axis=-1)

    return FnHandle(f.dim, "torus", f, grad, name="trigpoly",
                    grid_evaluator=lambda axes: f.on_grid(axes))


# -- integration -----------------------------------------------------------

def _mean_over_grid(v, dim):
    return v.reshape(v.shape[:v.ndim - dim] + (-1,)).mean(axis=-1)


def _lp_from_moments(m: float, hw_m: float, p: float) -> Estimate:
    val = m ** (1.0 / p)
    hi = (m + hw_m) ** (1.0 / p)
    lo = max(m - hw_m, 0.0) ** (1.0 / p)
    return Estimate(val, max(hi - val, val - lo))


def lp_norm_est(h, p: float, quad: QuadratureSpec | None = None) -> Estimate:
    """(int |h|^p)^(1/p) against the uniform probability measure."""
    if p < 1:
        raise ValueError("p must be >= 1")
    h = as_handle(h)
    quad = quad or QuadratureSpec.default(h.dim)
    if quad.scheme == "grid":
        fine = np.mean(np.abs(h.on_grid([quad.axis_nodes()] * h.dim)) ** p)
        val = fine ** (1.0 / p)
        cq = quad.coarse()
        if cq is None:
            return Estimate(float(val), float("inf"))
        coarse = np.mean(np.abs(h.on_grid([cq.axis_nodes()] * h.dim)) ** p) ** (1.0 / p)
        return Estimate(float(val), float(abs(val - coarse)))
    v = np.abs(h(nodes(quad, h.dim))) ** p
    m = float(v.mean())
    hw = Z99 * float(v.std(ddof=1)) / math.sqrt(len(v)) if len(v) > 1 else float("inf")
    return _lp_from_moments(m, hw, p)


def mean_est(h, quad: QuadratureSpec | None = None) -> Estimate:
    """Integral of h with a half-width."""
    h = as_handle(h)
    quad = quad or QuadratureSpec.default(h.dim)
    if quad.scheme == "grid":
        val = float(np.mean(h.on_grid([quad.axis_nodes()] * h.dim)))
        cq = quad.coarse()
        if cq is None:
            return Estimate(val, float("inf"))
        coarse = float(np.mean(h.on_grid([cq.axis_nodes()] * h.dim)))
        return Estimate(val, abs(val - coarse))
    v = h(nodes(quad, h.dim))
    hw = Z99 * float(v.std(ddof=1)) / math.sqrt(len(v)) if len(v) > 1 else float("inf")
    return Estimate(float(v.mean()), hw)


class ProbabilityEstimate(NamedTuple):
    value: float
    std_error: float
    half_width: float


def probability_est(h, predicate: Callable[[np.ndarray], np.ndarray],
                    quad: QuadratureSpec) -> ProbabilityEstimate:
    """Monte-Carlo estimate of P(predicate(h(x))) with its standard error."""
    h = as_handle(h)
    if quad.scheme != "mc":
        raise ValueError("probability_est needs a Monte-Carlo spec")
    hits = np.asarray(predicate(h(nodes(quad, h.dim))), dtype=bool)
    p = float(hits.mean())
    se = math.sqrt(max(p * (1 - p), 0.0) / len(hits))
    return ProbabilityEstimate(p, se, Z99 * se)


def trig_partial_l1(f: TrigPoly, quad: QuadratureSpec | None = None,
                    polys: list[TrigPoly] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """L1 norms of several polynomials (default: the partials of f).

    Returns (values, half_widths) as arrays.
    """
    polys = gradient(f) if polys is None else polys
    quad = quad or QuadratureSpec.grid_for(f.dim)
    if not polys:
        return np.zeros(0), np.zeros(0)
    if quad.scheme == "grid":
        def l1(q):
            return _mean_over_grid(np.abs(grid_values(polys, [q.axis_nodes()] * f.dim)), f.dim)

        fine = l1(quad)
        cq = quad.coarse()
        hw = np.abs(fine - l1(cq)) if cq is not None else np.full_like(fine, np.inf)
        return fine, hw
    X = nodes(quad, f.dim)
    vals, hws = [], []
    for g in polys:
        v = np.abs(g(X))
        vals.append(v.mean())
        hws.append(Z99 * v.std(ddof=1) / math.sqrt(len(v)))
    return np.array(vals), np.array(hws)


# -- influences ------------------------------------------------------------

@dataclass(frozen=True)
class InfluenceProfile:
    """Per-coordinate gradient mass.

    ``l1[n]`` estimates ||d_n f||_1 and ``l2[n]`` estimates ||d_n f||_2; the
    ``*_half_width`` arrays carry estimator uncertainty (zero when exact).
    """

    l1: np.ndarray
    l1_half_width: np.ndarray
    l2: Optional[np.ndarray] = None
    l2_half_width: Optional[np.ndarray] = None

    def __post_init__(self):
        if np.any(np.asarray(self.l1) < 0):
            raise ValueError("influences must be non-negative")

    @property
    def dim(self) -> int:
        return len(self.l1)

    @property
    def total(self) -> Estimate:
        return Estimate(float(np.sum(self.l1)), float(np.sum(self.l1_half_width)))

    def to_dict(self) -> dict:
        out = {"l1": [float(v) for v in self.l1],
               "l1_half_width": [float(v) for v in self.l1_half_width]}
        if self.l2 is not None:
            out["l2"] = [float(v) for v in self.l2]
            out["l2_half_width"] = [float(v) for v in self.l2_half_width]
        return out


def _partials_at(h: FnHandle, X: np.ndarray, step: float) -> np.ndarray:
    """Partial derivatives at points X, shape (P, dim)."""
    if h.gradient is not None:
        return np.asarray(h.gradient(X), dtype=float).reshape(X.shape)
    out = np.empty_like(X)
    for n in range(h.dim):
        xp = X.copy()
        xm = X.copy()
        if h.domain == "torus":
            xp[:, n] = (xp[:, n] + step) % 1.0
            xm[:, n] = (xm[:, n] - step) % 1.0
            width = np.full(len(X), 2 * step)
        else:
            hi = X[:, n] + step > 1.0
            lo = X[:, n] - step < 0.0
            xp[:, n] = np.where(hi, X[:, n], X[:, n] + step)
            xm[:, n] = np.where(lo, X[:, n], X[:, n] - step)
            width = xp[:, n] - xm[:, n]
        fp, fm = h(xp), h(xm)
        d = (fp - fm) / width
        if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
            raise FloatingPointError("non-finite function evaluation")
        out[:, n] = d
    return out


def finite_diff_influences(h, step: float = DEFAULT_STEP,
                           quad: QuadratureSpec | None = None) -> InfluenceProfile:
    """Estimate (||d_n h||_1)_n and (||d_n h||_2)_n by finite differences.

    Central differences on the torus; on the cube the stencil becomes
    one-sided within ``step`` of the boundary.  An analytic gradient on the
    handle is used instead when present.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    h = as_handle(h)
    quad = quad or QuadratureSpec.default(h.dim)

    def moments(q):
        D = _partials_at(h, nodes(q, h.dim), step)
        return np.abs(D), D**2

    a1, a2 = moments(quad)
    l1, sq = a1.mean(axis=0), a2.mean(axis=0)
    l2 = np.sqrt(sq)
    if quad.scheme == "grid":
        cq = quad.coarse()
        if cq is None:
            inf = np.full(h.dim, np.inf)
            return InfluenceProfile(l1, inf, l2, inf)
        c1, c2 = moments(cq)
        return InfluenceProfile(l1, np.abs(l1 - c1.mean(axis=0)),
                                l2, np.abs(l2 - np.sqrt(c2.mean(axis=0))))
    n = len(a1)
    hw1 = Z99 * a1.std(axis=0, ddof=1) / math.sqrt(n)
    hw_sq = Z99 * a2.std(axis=0, ddof=1) / math.sqrt(n)
    hw2 = np.array([_lp_from_moments(float(m), float(w), 2).half_width for m, w in zip(sq, hw_sq)])
    return InfluenceProfile(l1, hw1, l2, hw2)


# -- conditional expectation on a grid -------------------------------------

def grid_cond_exp_values(values: np.ndarray, S: Iterable[int]) -> np.ndarray:
    """Average a grid tensor over every axis outside S (kept as size-1 axes)."""
    S = coord_set(S, values.ndim)
    out = tuple(n for n in range(values.ndim) if n not in S)
    if not out:
        return values
    return values.mean(axis=out, keepdims=True)


def grid_cond_exp(h, S: Iterable[int], quad: QuadratureSpec) -> FnHandle:
    """E_S h with the integral over the excluded coordinates done on the grid.

    The returned handle, evaluated at x, averages h(x_S, y) over the grid
    nodes y of the coordinates outside S.
    """
    h = as_handle(h)
    if quad.scheme != "grid":
        raise ValueError("grid_cond_exp needs a tensor-grid quadrature spec")
    S = coord_set(S, h.dim)
    out = [n for n in range(h.dim) if n not in S]
    if not out:
        return h
    ax = quad.axis_nodes()
    mesh = np.meshgrid(*([ax] * len(out)), indexing="ij")
    Y = np.stack([m.ravel() for m in mesh], axis=-1)

    def evaluator(X):
        X = np.asarray(X, dtype=float).reshape(-1, h.dim)
        res = np.empty(len(X))
        chunk = max(1, 2**20 // len(Y))
        for i in range(0, len(X), chunk):
            block = np.repeat(X[i:i + chunk, None, :], len(Y), axis=1)
            block[:, :, out] = Y[None, :, :]
            res[i:i + chunk] = h(block.reshape(-1, h.dim)).reshape(-1, len(Y)).mean(axis=1)
        return res

    def grid_eval(axes):
        if all(len(a) == len(ax) and np.array_equal(a, ax) for a in axes):
            full = h.on_grid(axes)
            return np.broadcast_to(grid_cond_exp_values(full, S), full.shape).copy()
        sub = [axes[n] if n in S else ax for n in range(h.dim)]
        full = h.on_grid(sub)
        red = grid_cond_exp_values(full, S)
        shape = [len(a) for a in axes]
        return np.broadcast_to(red, shape).copy()

    name = f"E_{{{','.join(str(n) for n in S)}}}[{h.name}]"
    return FnHandle(h.dim, h.domain, evaluator, None, name, grid_evaluator=grid_eval)


# -- tent map transfer -----------------------------------------------------

def tent_map(theta) -> np.ndarray:
    """F(theta) = 2 theta on [0, 1/2), 2 - 2 theta on [1/2, 1), theta mod 1."""
    th = np.mod(np.asarray(theta, dtype=float), 1.0)
    return np.where(th < 0.5, 2.0 * th, 2.0 - 2.0 * th)


def tent_slope(theta) -> np.ndarray:
    th = np.mod(np.asarray(theta, dtype=float), 1.0)
    return np.where(th < 0.5, 2.0, -2.0)


def tent_transfer(h: FnHandle) -> FnHandle:
    """Pull a cube function back to the torus along the product tent map."""
    if h.domain != "cube":
        raise ValueError("tent_transfer needs a handle on the cube")

    def evaluator(T):
        return h(tent_map(T))

    grad = None
    if h.gradient is not None:
        def grad(T):
            T = np.asarray(T, dtype=float)
            return np.asarray(h.gradient(tent_map(T))) * tent_slope(T)

    return FnHandle(h.dim, "torus", evaluator, grad, name=f"tent[{h.name}]")


# -- Gaussian representation of the heat semigroup -------------------------

@dataclass(frozen=True)
class GaussianSmoothed(FnHandle):
    """Monte-Carlo average of f(x + y) over fixed Gaussian draws y."""

    offsets: np.ndarray = field(default=None, repr=False)

    def evaluate_with_error(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Values and pointwise 99% half-widths."""
        return _gauss_average(self.evaluator.base, self.offsets, X, with_error=True)


class _GaussAverager:
    def __init__(self, base: FnHandle, offsets: np.ndarray):
        self.base = base
        self.offsets = offsets

    def __call__(self, X):
        return _gauss_average(self.base, self.offsets, X)[0]


def _gauss_average(base, Y, X, with_error=False):
    X = np.asarray(X, dtype=float).reshape(-1, base.dim)
    mean = np.empty(len(X))
    hw = np.empty(len(X))
    chunk = max(1, 2**20 // len(Y))
    for i in range(0, len(X), chunk):
        pts = np.mod(X[i:i + chunk, None, :] + Y[None, :, :], 1.0)
        v = base(pts.reshape(-1, base.dim)).reshape(-1, len(Y))
        mean[i:i + chunk] = v.mean(axis=1)
        if with_error:
            sd = v.std(axis=1, ddof=1) if len(Y) > 1 else np.full(len(v), np.inf)
            hw[i:i + chunk] = Z99 * sd / math.sqrt(len(Y))
    return mean, (hw if with_error else None)


def heat_gaussian(h, variance: float, samples: int, seed: int = 0) -> GaussianSmoothed:
    """x -> mean_j h(x + y_j) with y_j ~ N(0, variance I) drawn once from ``seed``.

    On a single Fourier mode k the expected multiplier is
    exp(-2 pi^2 |k|^2 variance), so ``heat_gaussian(h, 2 t, ...)``
    estimates ``heat(h, t)``.
    """
    if variance < 0:
        raise ValueError("variance must be non-negative")
    if samples < 1:
        raise ValueError("need at least one sample")
    h = as_handle(h)
    if h.domain != "torus":
        raise ValueError("heat_gaussian acts on torus functions")
    Y = rng_for(seed, 11).normal(0.0, math.sqrt(variance), size=(samples, h.dim))
    avg = _GaussAverager(h, Y)
    return GaussianSmoothed(h.dim, "torus", avg, None, f"gauss[{h.name}]", None, Y)


# -- grid dump files -------------------------------------------------------

def write_grid_dump(h, quad: QuadratureSpec, path) -> None:
    """CSV with one row per grid node: x0..x{N-1}, value."""
    h = as_handle(h)
    X = nodes(quad, h.dim)
    V = h(X)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{n}" for n in range(h.dim)] + ["value"])
        for x, v in zip(X, V):
            w.writerow([repr(float(c)) for c in x] + [repr(float(v))])


def read_grid_dump(path, domain: str = "cube") -> FnHandle:
    """Load a grid dump as a handle (multilinear interpolation between nodes)."""
    from scipy.interpolate import RegularGridInterpolator

    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    dim = len(header) - 1
    if dim < 1 or not body:
        raise ValueError("grid dump must have coordinate columns and at least one row")
    data = np.array(body, dtype=float)
    axes = [np.unique(data[:, n]) for n in range(dim)]
    shape = tuple(len(a) for a in axes)
    if np.prod(shape) != len(data):
        raise ValueError("grid dump nodes do not form a tensor grid")
    idx = tuple(np.searchsorted(axes[n], data[:, n]) for n in range(dim))
    values = np.full(shape, np.nan)
    values[idx] = data[:, dim]
    if np.any(np.isnan(values)):
        raise ValueError("grid dump has missing nodes")
    interp = RegularGridInterpolator(axes, values, method="linear", bounds_error=False, fill_value=None)

    def evaluator(X):
        X = np.asarray(X, dtype=float).reshape(-1, dim)
        if domain == "torus":
            X = np.mod(X, 1.0)
        return interp(np.clip(X, [a[0] for a in axes], [a[-1] for a in axes]))

    return FnHandle(dim, domain, evaluator, None, name=str(path))
