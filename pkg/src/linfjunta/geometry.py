"""Hamming-metric vector maps and separated box sets.

Two consumers of junta extraction live here.  ``hamming_junta_map`` replaces
most components of a Lipschitz map F: [0,1]^N -> [0,1]^M by juntas and the
rest by constants.  ``separated_junta_sets`` turns two l_inf-separated sets
into level sets of a junta that stay separated.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import ndimage

from .junta import _ErrorTable, extract_junta, select_parameters
from .quadrature import (Estimate, FnHandle, QuadratureSpec, Z99, finite_diff_influences,
                         grid_cond_exp, mean_est, nodes, rng_for)

BUDGET_TOL = 1e-9


def hamming_distance(x, y, d: Optional[Callable] = None) -> float:
    """(1/N) sum_n d(x_n, y_n); the base metric defaults to |a - b|."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("points must be vectors of equal length")
    if d is None:
        return float(np.mean(np.abs(x - y)))
    return float(np.mean([d(a, b) for a, b in zip(x, y)]))


def linf_product_distance(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("points must have equal length")
    return float(np.max(np.abs(x - y))) if x.size else 0.0


# -- vector maps -----------------------------------------------------------

@dataclass(frozen=True)
class VectorMap:
    """F = (F_1..F_M): [0,1]^N -> [0,1]^M with declared Lipschitz bound L.

    L bounds the Hamming-Lipschitz stretch in the form
    sum_m |F_m(x + dx) - F_m(x)| <= L sum_n |dx_n|, i.e. for smooth maps
    sup_x max_n sum_m |d_n F_m(x)| <= L.  When M = N this is exactly the
    Lipschitz constant between the normalised Hamming metrics.
    """

    components: tuple
    L: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("a vector map needs at least one component")
        dims = {c.dim for c in comps}
        if len(dims) != 1:
            raise ValueError("components must share one input dimension")
        if any(c.domain != "cube" for c in comps):
            raise ValueError("components must be handles on the cube")
        if not self.L > 0:
            raise ValueError("L must be positive")
        object.__setattr__(self, "components", comps)

    @property
    def N(self) -> int:
        return self.components[0].dim

    @property
    def M(self) -> int:
        return len(self.components)

    @property
    def alpha(self) -> float:
        return self.M / self.N

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.stack([c(X) for c in self.components], axis=-1)

    def range_ok(self, samples: int = 4096, seed: int = 0) -> bool:
        """Component values in [0,1] at random points and at the corners."""
        X = rng_for(seed, 21).random((samples, self.N))
        if self.N <= 12:
            corners = np.array(np.meshgrid(*([[0.0, 1.0]] * self.N), indexing="ij"))
            X = np.vstack([X, corners.reshape(self.N, -1).T])
        V = self(X)
        return bool(np.all(V >= -1e-12) and np.all(V <= 1 + 1e-12))

    def hamming_stretch(self, samples: int = 4096, seed: int = 0, scale: float = 1e-3) -> float:
        """Largest sampled ratio sum_m |dF_m| / sum_n |dx_n| over nearby pairs."""
        rng = rng_for(seed, 22)
        X = rng.random((samples, self.N)) * (1 - 2 * scale) + scale
        D = rng.uniform(-scale, scale, (samples, self.N))
        num = np.abs(self(X + D) - self(X)).sum(axis=1)
        den = np.abs(D).sum(axis=1)
        return float(np.max(num / den))

    def to_dict(self) -> dict:
        return {"N": self.N, "M": self.M, "alpha": self.alpha, "L": self.L,
                "metadata": dict(self.metadata)}


def _cube_handle(fn, grad, dim, name) -> FnHandle:
    return FnHandle(dim, "cube", fn, grad, name=name)


def identity_map(N: int) -> VectorMap:
    comps = []
    for n in range(N):
        def fn(X, n=n):
            return X[:, n]

        def grad(X, n=n):
            G = np.zeros_like(X)
            G[:, n] = 1.0
            return G
        comps.append(_cube_handle(fn, grad, N, f"x{n}"))
    return VectorMap(tuple(comps), 1.0, {"family": "identity"})


def sine_family(N: int) -> VectorMap:
    """(x_1, ..., x_{N-1}, (1 + sin(2 pi (x_1 + ... + x_N))) / 2).

    Column sums of the Jacobian reach 1 + pi (at x with sum(x) an integer),
    so L = 1 + pi is declared.  The unscaled sine would need 1 + 2 pi.
    """
    if N < 2:
        raise ValueError("the sine family needs N >= 2")
    base = identity_map(N).components[:N - 1]

    def fn(X):
        return 0.5 * (1.0 + np.sin(2 * np.pi * X.sum(axis=1)))

    def grad(X):
        g = np.pi * np.cos(2 * np.pi * X.sum(axis=1))
        return np.repeat(g[:, None], X.shape[1], axis=1)

    last = _cube_handle(fn, grad, N, "sine")
    meta = {"family": "sine", "rescaled": "(1 + sin) / 2 in the last coordinate",
            "published_L": 2.0, "column_sum_bound": 1.0 + math.pi}
    return VectorMap(tuple(base) + (last,), 1.0 + math.pi, meta)


def random_smooth_map(N: int, M: int, seed: int = 0, active: int = 2) -> VectorMap:
    """Random smooth map whose declared L is a proven column-sum bound.

    F_m = 1/2 + sum_n c_mn sin(2 pi x_n + phi_mn) + d_m sin(2 pi x_i + psi) sin(2 pi x_j + chi)
    with at most ``active`` nonzero c_mn per component and sum |c| + |d| <= 1/2.
    """
    rng = rng_for(seed, 23)
    C = np.zeros((M, N))
    phi = rng.uniform(0, 2 * np.pi, (M, N))
    pairs, dvals, ang = [], [], []
    for m in range(M):
        idx = rng.choice(N, size=min(active, N), replace=False)
        C[m, idx] = rng.uniform(-1, 1, len(idx))
        i, j = rng.choice(N, size=2, replace=N < 2)
        pairs.append((int(i), int(j)))
        dvals.append(rng.uniform(-0.5, 0.5))
        ang.append(rng.uniform(0, 2 * np.pi, 2))
    dvals = np.array(dvals)
    tot = np.abs(C).sum(axis=1) + np.abs(dvals)
    shrink = 0.5 / np.maximum(tot, 0.5) * rng.uniform(0.5, 1.0, M)
    C *= shrink[:, None]
    dvals = dvals * shrink
    col = 2 * np.pi * np.abs(C)
    for m, (i, j) in enumerate(pairs):
        col[m, i] += 2 * np.pi * abs(dvals[m])
        col[m, j] += 2 * np.pi * abs(dvals[m])
    L = float(col.sum(axis=0).max())

    comps = []
    for m in range(M):
        i, j = pairs[m]
        psi, chi = ang[m]
        c, p, d = C[m], phi[m], dvals[m]

        def fn(X, c=c, p=p, d=d, i=i, j=j, psi=psi, chi=chi):
            S = np.sin(2 * np.pi * X + p) @ c
            return 0.5 + S + d * np.sin(2 * np.pi * X[:, i] + psi) * np.sin(2 * np.pi * X[:, j] + chi)

        def grad(X, c=c, p=p, d=d, i=i, j=j, psi=psi, chi=chi):
            G = 2 * np.pi * c * np.cos(2 * np.pi * X + p)
            si, sj = np.sin(2 * np.pi * X[:, i] + psi), np.sin(2 * np.pi * X[:, j] + chi)
            G[:, i] += d * 2 * np.pi * np.cos(2 * np.pi * X[:, i] + psi) * sj
            G[:, j] += d * 2 * np.pi * si * np.cos(2 * np.pi * X[:, j] + chi)
            return G
        comps.append(_cube_handle(fn, grad, N, f"F{m}"))
    return VectorMap(tuple(comps), L, {"family": "random_smooth", "seed": seed})


@dataclass(frozen=True)
class JuntaMap:
    components: tuple
    S: tuple
    I: tuple
    errors: tuple
    masses: tuple
    epsilon: float
    total_error: Estimate
    selection_threshold: float
    mass_budget: float
    notes: tuple = ()

    @property
    def M(self) -> int:
        return len(self.components)

    @property
    def selection_ok(self) -> bool:
        return len(self.I) >= (1 - self.epsilon / 2) * self.M

    @property
    def max_support(self) -> int:
        return max((len(s) for s in self.S), default=0)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "I": list(self.I),
            "S": [list(s) for s in self.S],
            "component_errors": [e.value for e in self.errors],
            "component_half_widths": [e.half_width for e in self.errors],
            "gradient_mass": list(self.masses),
            "selection_threshold": self.selection_threshold,
            "mass_budget": self.mass_budget,
            "selection_ok": self.selection_ok,
            "max_support": self.max_support,
            "total_error": self.total_error.value,
            "total_half_width": self.total_error.half_width,
            "notes": list(self.notes),
        }


def hamming_junta_map(F: VectorMap, epsilon: float, quad: QuadratureSpec | None = None) -> JuntaMap:
    """Per-component junta approximation of a Hamming-Lipschitz map.

    Components whose gradient mass exceeds 2L/(alpha eps) are replaced by
    their means; the others by empirical juntas at tolerance eps/2.
    Raises ``ValueError`` when the average gradient mass exceeds L/alpha,
    i.e. when F is not L-Lipschitz as declared.
    """
    if not 0 < epsilon <= 2:
        raise ValueError("epsilon must lie in (0, 2]")
    quad = quad or QuadratureSpec.grid_for(F.N)
    profiles = [finite_diff_influences(c, quad=quad) for c in F.components]
    masses = [p.total for p in profiles]
    budget = F.L / F.alpha
    avg = float(np.mean([m.value for m in masses]))
    avg_hw = float(np.mean([m.half_width for m in masses]))
    if avg - avg_hw > budget + BUDGET_TOL:
        raise ValueError(f"average gradient mass {avg:.6g} exceeds L/alpha = {budget:.6g}; "
                         "the map is not L-Lipschitz as declared")
    threshold = 2 * F.L / (F.alpha * epsilon)
    I = tuple(m for m, g in enumerate(masses) if g.value <= threshold)
    schedule = select_parameters(epsilon / 2, "empirical")
    comps, sets, errs, notes = [], [], [], []
    for m, h in enumerate(F.components):
        if m in I:
            approx = extract_junta(h, epsilon / 2, schedule, quad)
            comps.append(approx.projection)
            sets.append(approx.S)
            errs.append(approx.l1_error)
        else:
            mu = mean_est(h, quad).value
            comps.append(FnHandle(F.N, "cube", lambda X, mu=mu: np.full(len(X), mu),
                                  name=f"mean[{h.name}]"))
            sets.append(())
            errs.append(_ErrorTable(h, quad)(()))
            notes.append(f"component {m} left I and was replaced by its mean")
    total = Estimate(float(np.mean([e.value for e in errs])),
                     float(np.mean([e.half_width for e in errs])))
    if not len(I) >= (1 - epsilon / 2) * F.M:
        notes.append("selection bound |I| >= (1 - eps/2) M failed")
    return JuntaMap(tuple(comps), tuple(sets), I, tuple(errs),
                    tuple(m.value for m in masses), epsilon, total, threshold, budget,
                    tuple(notes))


# -- box sets and isoperimetry ---------------------------------------------

@dataclass(frozen=True)
class BoxSet:
    """Finite union of closed axis-aligned boxes in [0,1]^N.

    ``boxes`` has shape (B, N, 2) holding [lo, hi] per coordinate.
    """

    boxes: np.ndarray

    def __post_init__(self):
        b = np.array(self.boxes, dtype=float)
        if b.ndim != 3 or b.shape[2] != 2 or len(b) == 0:
            raise ValueError("a box set needs a nonempty (B, N, 2) interval array")
        if np.any(b[..., 0] > b[..., 1]):
            raise ValueError("interval endpoints must satisfy lo <= hi")
        if np.any(b < 0) or np.any(b > 1):
            raise ValueError("intervals must lie inside [0, 1]")
        b.setflags(write=False)
        object.__setattr__(self, "boxes", b)

    @property
    def dim(self) -> int:
        return self.boxes.shape[1]

    def gaps(self, X) -> np.ndarray:
        """l_inf distance from each point to each box, shape (P, B)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        lo, hi = self.boxes[None, :, :, 0], self.boxes[None, :, :, 1]
        x = X[:, None, :]
        return np.maximum(np.maximum(lo - x, x - hi), 0.0).max(axis=2)

    def distance(self, X) -> np.ndarray:
        return self.gaps(X).min(axis=1)

    def contains(self, X) -> np.ndarray:
        return self.distance(X) == 0.0

    def to_json(self) -> str:
        return json.dumps(self.boxes.tolist())

    @classmethod
    def from_json(cls, text: str) -> "BoxSet":
        return cls(np.array(json.loads(text), dtype=float))

    @classmethod
    def single(cls, intervals: Sequence[Sequence[float]]) -> "BoxSet":
        return cls(np.array([intervals], dtype=float))


def linf_distance(A: BoxSet, B: BoxSet) -> float:
    """inf of d_inf(x, y) over x in A, y in B; exact."""
    if A.dim != B.dim:
        raise ValueError("box sets must have the same dimension")
    a, b = A.boxes[:, None], B.boxes[None, :]
    gap = np.maximum(np.maximum(b[..., 0] - a[..., 1], a[..., 0] - b[..., 1]), 0.0)
    return float(gap.max(axis=2).min())


def clipped_distance(A: BoxSet, delta: float) -> FnHandle:
    """x -> min(delta, dist_inf(x, A)); 1-Lipschitz for d_inf."""
    return FnHandle(A.dim, "cube", lambda X: np.minimum(delta, A.distance(X)),
                    name=f"min(delta, dist(., A))")


@dataclass(frozen=True)
class IsoperimetryReport:
    S: tuple
    delta: float
    epsilon: float
    levels: tuple
    junta_tolerance: float
    junta_error: Estimate
    loss_A: Estimate
    loss_B: Estimate
    separation: float
    separation_resolution: float
    samples: int

    @property
    def passed(self) -> bool:
        return (self.loss_A.value < self.epsilon and self.loss_B.value < self.epsilon
                and self.separation >= self.delta - self.epsilon)

    def to_dict(self) -> dict:
        return {"S": list(self.S), "delta": self.delta, "epsilon": self.epsilon,
                "level_lo": self.levels[0], "level_hi": self.levels[1],
                "junta_tolerance": self.junta_tolerance,
                "junta_error": self.junta_error.value,
                "junta_half_width": self.junta_error.half_width,
                "loss_A": self.loss_A.value, "loss_A_half_width": self.loss_A.half_width,
                "loss_B": self.loss_B.value, "loss_B_half_width": self.loss_B.half_width,
                "separation": self.separation, "separation_resolution": self.separation_resolution,
                "samples": self.samples, "passed": self.passed}


def _loss(inside: np.ndarray, lost: np.ndarray) -> Estimate:
    hits = (inside & lost).astype(float)
    p = float(hits.mean())
    return Estimate(p, Z99 * math.sqrt(p * (1 - p) / len(hits)))


def separated_junta_sets(A: BoxSet, B: BoxSet, delta: float, epsilon: float,
                         quad: QuadratureSpec | None = None, samples: int = 2**13,
                         seed: int = 0, theta: Optional[tuple] = None):
    """Junta level sets A' = {g <= lo}, B' = {g >= hi} with g = E_S min(delta, dist(., A)).

    By default lo = eps/2, hi = delta - eps/2 and the junta is extracted at
    tolerance eps^2/4: Markov's inequality then bounds each loss by eps/2 and
    the 1-Lipschitz g keeps A' and B' at distance >= delta - eps.  Passing
    ``theta = (theta_lo, theta_hi)`` uses the levels delta * theta instead.

    Returns ``(S, values, report)`` where ``values`` is g on the S-grid.
    """
    if A.dim != B.dim:
        raise ValueError("box sets must have the same dimension")
    if not (delta > 0 and epsilon > 0):
        raise ValueError("delta and epsilon must be positive")
    if linf_distance(A, B) < delta - 1e-12:
        raise ValueError("A and B are closer than delta")
    N = A.dim
    quad = quad or QuadratureSpec.grid_for(N, budget=2**18)
    if theta is None:
        lo, hi = epsilon / 2, delta - epsilon / 2
        tol = epsilon**2 / 4
    else:
        lo, hi = delta * theta[0], delta * theta[1]
        tol = epsilon * min(theta[0], 1 - theta[1]) * delta / 2
    if not lo < hi:
        raise ValueError("level sets overlap; need epsilon < delta")
    f = clipped_distance(A, delta)
    approx = extract_junta(f, tol, select_parameters(min(tol, 2.0), "empirical"), quad)
    S = approx.S
    g = grid_cond_exp(f, S, quad)

    ax = quad.axis_nodes()
    if S:
        sub = [ax if n in S else ax[:1] for n in range(N)]
        G = g.on_grid(sub).reshape([len(ax)] * len(S))
        inA, inB = G <= lo, G >= hi
        if inA.any() and inB.any():
            # chessboard distance from every node to the nearest A' node
            steps = ndimage.distance_transform_cdt(~inA, metric="chessboard")
            sep = float(steps[inB].min()) * quad.mesh
        else:
            sep = math.inf
    else:
        G = np.array(g.on_grid([ax[:1]] * N)).reshape(())
        sep = math.inf if not (G <= lo and G >= hi) else 0.0

    X = nodes(QuadratureSpec.mc(samples, seed), N)
    gx = g(X)
    report = IsoperimetryReport(
        S, delta, epsilon, (lo, hi), tol, approx.l1_error,
        _loss(A.contains(X), gx > lo), _loss(B.contains(X), gx < hi),
        sep, quad.mesh, samples)
    return S, G, report


def random_separated_boxes(N: int, delta: float, seed: int = 0, max_boxes: int = 3):
    """Random A, B (<= max_boxes boxes each) with linf_distance(A, B) >= delta.

    A splitting coordinate n0 and cut c are drawn; A lives in x_{n0} <= c and
    B in x_{n0} >= c + delta, with random extents in the other coordinates.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    rng = rng_for(seed, 31)
    n0 = int(rng.integers(N))
    c = float(rng.uniform(0, 1 - delta))

    def make(lo_cut, hi_cut):
        boxes = []
        for _ in range(int(rng.integers(1, max_boxes + 1))):
            u = np.sort(rng.random((N, 2)), axis=1)
            u[n0] = np.sort(rng.uniform(lo_cut, hi_cut, 2))
            boxes.append(u)
        return BoxSet(np.array(boxes))

    return make(0.0, c), make(c + delta, 1.0)
