"""Numerical checks of the smoothing, Poincare and hypercontractive estimates.

Each ``verify_*`` function evaluates both sides of one inequality on a given
trigonometric polynomial and returns an :class:`InequalityReport`.  Sides
computed by Parseval are exact; L1 and L_p sides carry quadrature
half-widths.  A check passes when ``lhs <= rhs + tolerance`` with

* exact comparisons: tolerance 1e-12;
* quadrature comparisons: the combined half-width plus 1e-9.

Two heat conventions appear.  "spectral": heat(f, t) has Fourier multiplier
exp(-4 pi^2 |k|^2 t).  "gaussian": averaging over N(0, s) shifts, multiplier
exp(-2 pi^2 |k|^2 s), i.e. heat(f, s/2).
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional

import numpy as np

from .junta import _threshold, exponents
from .quadrature import (Z99, Estimate, QuadratureSpec, heat_gaussian, lp_norm_est, rng_for,
                         trig_partial_l1)
from .torus import (TrigPoly, centered_l2_norm, coord_set, cond_exp, gaussian_smooth,
                    grad_norm, gradient, heat, l2_norm, partial_l2_norms)

EXACT_TOL = 1e-12
QUAD_TOL = 1e-9
HYPER_NODE_FACTOR = 4

SPECTRAL = "spectral: heat(f,t) multiplier exp(-4 pi^2 |k|^2 t)"
GAUSSIAN = "gaussian: average over N(0,s)^N shifts, multiplier exp(-2 pi^2 |k|^2 s) = heat(f, s/2)"


@dataclass
class InequalityReport:
    name: str
    params: dict
    lhs: float
    rhs: float
    half_width: float = 0.0
    tolerance: float = EXACT_TOL
    convention: str = ""
    extras: dict = field(default_factory=dict)
    passed: bool = field(init=False)
    slack: float = field(init=False)

    def __post_init__(self):
        self.slack = self.rhs - self.lhs
        ok = self.lhs <= self.rhs + self.tolerance
        for v in self.extras.get("variants", {}).values():
            ok = ok and v["passed"]
        self.passed = bool(ok)
        for v in (self.lhs, self.rhs, self.half_width):
            if not math.isfinite(v):
                raise FloatingPointError(f"{self.name}: non-finite report value")

    @property
    def certain(self) -> bool:
        """Passes with slack beyond the estimator half-width."""
        return self.passed and self.slack >= self.half_width - EXACT_TOL

    def to_dict(self) -> dict:
        d = asdict(self)
        d["certain"] = self.certain
        return d


def _variant(lhs, rhs, tol, convention, hw=0.0) -> dict:
    return {"lhs": lhs, "rhs": rhs, "slack": rhs - lhs, "half_width": hw,
            "passed": bool(lhs <= rhs + tol), "convention": convention}


@functools.lru_cache(maxsize=64)
def _l1_norms(polys: tuple, quad: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    return trig_partial_l1(polys[0], quad, polys=list(polys))


def _quad(f: TrigPoly, quad) -> QuadratureSpec:
    return quad or QuadratureSpec.grid_for(f.dim)


# -- random instances --------------------------------------------------------

@dataclass(frozen=True)
class RandomPolySpec:
    dim: int
    degree: int
    scale: float = 1.0
    seed: int = 0
    normalize: bool = True

    def __post_init__(self):
        if self.dim < 1 or self.degree < 1:
            raise ValueError("need dim >= 1 and degree >= 1")


def normalization_factor(f: TrigPoly, quad: QuadratureSpec | None = None) -> float:
    """c >= 1 such that f / c has gradient mass <= 1 and centred L2 norm <= 1.

    The gradient mass is taken at the upper end of its quadrature interval.
    """
    G = grad_norm(f, 1, _quad(f, quad))
    return max(1.0, G.value + G.half_width, centered_l2_norm(f))


def random_trigpoly(spec: RandomPolySpec, quad: QuadratureSpec | None = None) -> TrigPoly:
    """Random real polynomial with frequencies in [-degree, degree]^dim.

    Amplitudes are complex normal scaled by ``scale / (1 + |k|^2)``; the mean
    is real normal times ``scale``.
    """
    rng = rng_for(spec.seed, 101)
    box = np.array(list(itertools.product(range(-spec.degree, spec.degree + 1), repeat=spec.dim)))
    # one representative of each +-k pair: first non-zero entry positive
    first = np.array([row[np.flatnonzero(row)[0]] if row.any() else 0 for row in box])
    half = box[first > 0]
    k2 = np.sum(half**2, axis=1)
    amp = spec.scale * (rng.normal(size=len(half)) + 1j * rng.normal(size=len(half))) / np.sqrt(2)
    amp = amp / (1.0 + k2)
    terms = {tuple(int(v) for v in k): c for k, c in zip(half, amp)}
    terms[(0,) * spec.dim] = spec.scale * rng.normal()
    f = TrigPoly.from_half(spec.dim, terms)
    if spec.normalize and not f.is_zero():
        c = normalization_factor(f, quad)
        if c > 1.0:
            f = f / c
    return f


# -- the checks --------------------------------------------------------------

def verify_heat_l1(f: TrigPoly, t: float, quad: QuadratureSpec | None = None) -> InequalityReport:
    """||f - P f||_1 <= sqrt(s) * ||grad f||_{L1 l1}.

    Primary form: P averages over Gaussian shifts of variance s = t.  The
    spectral form uses heat(f, t), whose equivalent variance is 2t, against
    sqrt(2t).  Both must pass.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    quad = _quad(f, quad)
    partials = gradient(f)
    diffs = [f - gaussian_smooth(f, t), f - heat(f, t)]
    vals, hws = _l1_norms(tuple(partials + diffs), quad)
    G, G_hw = float(vals[:f.dim].sum()), float(hws[:f.dim].sum())
    (lg, ls), (hg, hs) = vals[f.dim:], hws[f.dim:]
    rhs_g, rhs_s = math.sqrt(t) * G, math.sqrt(2 * t) * G
    hw_g = hg + math.sqrt(t) * G_hw
    hw_s = hs + math.sqrt(2 * t) * G_hw
    spectral = _variant(float(ls), rhs_s, hw_s + QUAD_TOL, SPECTRAL + "; bound sqrt(2t)", float(hw_s))
    return InequalityReport(
        "heat_l1", {"t": t, "dim": f.dim, "quad": quad.to_dict()},
        float(lg), rhs_g, float(hw_g), float(hw_g) + QUAD_TOL,
        GAUSSIAN + "; variance s = t, bound sqrt(t)",
        {"grad_l1": G, "grad_l1_half_width": G_hw, "variants": {"spectral": spectral}})


def verify_reverse_poincare(f: TrigPoly, t: float) -> InequalityReport:
    """||grad heat(f,t)||_{L2 l2} <= ||f||_2 / sqrt(t), both sides exact."""
    if t <= 0:
        raise ValueError("t must be positive")
    lhs = grad_norm(heat(f, t), 2).value
    rhs = l2_norm(f) / math.sqrt(t)
    return InequalityReport("reverse_poincare", {"t": t, "dim": f.dim}, lhs, rhs,
                            convention=SPECTRAL)


def verify_hypercontractivity(f: TrigPoly, t: float,
                              quad: QuadratureSpec | None = None) -> InequalityReport:
    """||heat(f,t)||_2 <= ||f||_p with p = 1 + e^{-2t}.

    The L_p side uses four times the nodes of ``quad``.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    p = 1.0 + math.exp(-2.0 * t)
    q = _quad(f, quad).scaled(HYPER_NODE_FACTOR, f.dim)
    rhs = lp_norm_est(f, p, q)
    lhs = l2_norm(heat(f, t))
    return InequalityReport("hypercontractivity", {"t": t, "p": p, "dim": f.dim, "quad": q.to_dict()},
                            lhs, rhs.value, rhs.half_width, rhs.half_width + QUAD_TOL, SPECTRAL)


def verify_poincare_junta(f: TrigPoly, S: Iterable[int]) -> InequalityReport:
    """||f - E_S f||_2^2 <= sum_{n not in S} ||d_n f||_2^2, both sides exact."""
    S = coord_set(S, f.dim)
    lhs = l2_norm(f - cond_exp(f, S)) ** 2
    d2 = partial_l2_norms(f) ** 2
    rhs = float(sum(d2[n] for n in range(f.dim) if n not in S))
    return InequalityReport("poincare_junta", {"S": list(S), "dim": f.dim}, lhs, rhs)


@functools.lru_cache(maxsize=16)
def _normalized_profile(f: TrigPoly, quad: QuadratureSpec):
    """f centred and scaled by c >= 1, with the partial L1 norms of the result."""
    g = f - f.mean
    vals, hws = trig_partial_l1(g, quad)
    c = max(1.0, float(vals.sum() + hws.sum()), l2_norm(g))
    if c > 1.0:
        g, vals, hws = g / c, vals / c, hws / c
    return g, c, vals, hws


def _smoothed_S(f: TrigPoly, eta: float, quad: QuadratureSpec):
    g, c, vals, hws = _normalized_profile(f, quad)
    return g, c, _threshold(vals, hws, eta), vals


def verify_smoothed_junta(f: TrigPoly, t: float, eta: float,
                          quad: QuadratureSpec | None = None) -> InequalityReport:
    """||P_{2t} g - E_S P_{2t} g||_2 < t^{-a} eta^{b} for S = {n : ||d_n g||_1 >= eta}.

    g is f centred (the left side ignores constants) and scaled to unit
    gradient mass and unit L2 norm.  Primary: P_{2t} = heat(., 2t).  The
    Gaussian-convention variant P_{2t} = heat(., t) is checked as well.
    """
    if t <= 0 or eta <= 0:
        raise ValueError("t and eta must be positive")
    quad = _quad(f, quad)
    g, c, S, vals = _smoothed_S(f, eta, quad)
    a, b = exponents(t)
    rhs = t ** (-a) * eta ** b
    Ps, Pg = heat(g, 2 * t), heat(g, t)
    lhs = l2_norm(Ps - cond_exp(Ps, S))
    lhs_g = l2_norm(Pg - cond_exp(Pg, S))
    extras = {"S": list(S), "a": a, "b": b, "rescaling": c,
              "influences": [float(v) for v in vals],
              "variants": {"gaussian": _variant(lhs_g, rhs, EXACT_TOL, GAUSSIAN + "; P_2t = heat(., t)")}}
    rep = InequalityReport("smoothed_junta", {"t": t, "eta": eta, "dim": f.dim}, lhs, rhs,
                           convention=SPECTRAL + "; P_2t = heat(., 2t)", extras=extras)
    # the target inequality is strict
    rep.passed = rep.passed and lhs < rhs
    return rep


def verify_triangle_bound(f: TrigPoly, t: float, eta: float,
                          quad: QuadratureSpec | None = None) -> InequalityReport:
    """||g - E_S g||_1 <= 2 ||g - P g||_1 + ||P g - E_S P g||_2, P = heat(., t).

    Also checks the closed-form consequence 2 sqrt(2t) + t^{-a} eta^b for
    the same normalised g.
    """
    quad = _quad(f, quad)
    g, c, S, _ = _smoothed_S(f, eta, quad)
    P = heat(g, t)
    vals, hws = _l1_norms((g - cond_exp(g, S), g - P), quad)
    proj = l2_norm(P - cond_exp(P, S))
    lhs, rhs = float(vals[0]), 2 * float(vals[1]) + proj
    hw = float(hws[0] + 2 * hws[1])
    a, b = exponents(t)
    closed = 2 * math.sqrt(2 * t) + t ** (-a) * eta ** b
    extras = {"S": list(S), "rescaling": c,
              "variants": {"closed_form": _variant(lhs, closed, float(hws[0]) + QUAD_TOL,
                                                   GAUSSIAN, float(hws[0]))}}
    return InequalityReport("triangle_bound", {"t": t, "eta": eta, "dim": f.dim, "quad": quad.to_dict()},
                            lhs, rhs, hw, hw + QUAD_TOL, GAUSSIAN + "; P = heat(., t) = variance 2t",
                            extras)


def compare_heat_conventions(f: TrigPoly, t: float, samples: int = 256, seed: int = 0,
                             check_points: int = 16) -> InequalityReport:
    """||heat_gaussian(f, 2t) - heat(f, t)||_2 against its 99% Monte-Carlo radius.

    The Gaussian average over draws y_j has Fourier multiplier
    m_k = mean_j exp(2 pi i k.y_j), so the distance is exact given the draws.
    Its mean square is sum_k |c_k|^2 (1 - e^{-8 pi^2 |k|^2 t}) / samples;
    the radius is Z99 times its square root (the chi-square(1) quantile
    dominates weighted chi-square sums at this level).  The handle itself is
    spot-checked against the multiplier form.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    G = heat_gaussian(f, 2 * t, samples, seed)
    Y = G.offsets
    mult = np.exp(2j * math.pi * (Y @ f.freqs.T)).mean(axis=0)
    target = np.exp(-4 * math.pi**2 * np.sum(f.freqs**2, axis=1) * t)
    c2 = np.abs(f.coeffs) ** 2
    lhs = float(np.sqrt(np.sum(c2 * np.abs(mult - target) ** 2)))
    rhs = Z99 * float(np.sqrt(np.sum(c2 * (1 - target**2)) / samples))
    X = rng_for(seed, 12).random((check_points, f.dim))
    direct = G(X)
    spectral = TrigPoly.from_arrays(f.dim, f.freqs, f.coeffs * mult)(X)
    agree = float(np.max(np.abs(direct - spectral))) if check_points else 0.0
    extras = {"samples": samples, "pointwise_agreement": agree,
              "variants": {"pointwise": _variant(agree, 0.0, 1e-9, "handle vs multiplier form")}}
    return InequalityReport("heat_conventions", {"t": t, "dim": f.dim, "seed": seed},
                            lhs, rhs, 0.0, EXACT_TOL,
                            "heat_gaussian(f, 2t) vs heat(f, t); rhs is the 99% radius", extras)


CHECKS = {
    "heat_l1": ("t",),
    "reverse_poincare": ("t",),
    "hypercontractivity": ("t",),
    "poincare_junta": (),
    "smoothed_junta": ("t", "eta"),
    "triangle_bound": ("t", "eta"),
    "heat_conventions": ("t",),
}

DEFAULT_SUITE = {
    "instances": 200,
    "dims": [1, 5],
    "degrees": [1, 3],
    "checks": {
        "heat_l1": {"t": [0.001, 0.01, 0.1]},
        "reverse_poincare": {"t": [0.01, 0.1, 1.0]},
        "hypercontractivity": {"t": [0.1, 0.5, 1.0]},
        "poincare_junta": {},
        "smoothed_junta": {"t": [0.01, 0.1, 0.5], "eta": [0.01, 0.1, 0.5]},
        "triangle_bound": {"t": [0.01], "eta": [0.05]},
    },
}


def suite_instance(seed: int, index: int, dims=(1, 5), degrees=(1, 3)) -> tuple[TrigPoly, np.random.Generator]:
    """Instance ``index`` of a seeded suite and a generator for its parameters."""
    rng = rng_for(seed, 1000 + index)
    dim = int(rng.integers(dims[0], dims[1] + 1))
    degree = int(rng.integers(degrees[0], degrees[1] + 1))
    scale = float(rng.choice([0.05, 0.3, 1.0, 3.0]))
    f = random_trigpoly(RandomPolySpec(dim, degree, scale, int(rng.integers(2**62))))
    return f, rng


def run_check(name: str, f: TrigPoly, rng: np.random.Generator, quad=None, **params) -> InequalityReport:
    if name == "heat_l1":
        return verify_heat_l1(f, params["t"], quad)
    if name == "reverse_poincare":
        return verify_reverse_poincare(f, params["t"])
    if name == "hypercontractivity":
        return verify_hypercontractivity(f, params["t"], quad)
    if name == "poincare_junta":
        S = params.get("S")
        if S is None:
            S = [n for n in range(f.dim) if rng.random() < 0.5]
        return verify_poincare_junta(f, S)
    if name == "smoothed_junta":
        return verify_smoothed_junta(f, params["t"], params["eta"], quad)
    if name == "triangle_bound":
        return verify_triangle_bound(f, params["t"], params["eta"], quad)
    if name == "heat_conventions":
        return compare_heat_conventions(f, params["t"], seed=int(rng.integers(2**62)))
    raise KeyError(f"unknown check {name!r}")


def run_suite(suite: Optional[dict] = None, seed: int = 0):
    """Yield one report per (instance, check, parameter combination)."""
    suite = suite or DEFAULT_SUITE
    dims = suite.get("dims", DEFAULT_SUITE["dims"])
    degrees = suite.get("degrees", DEFAULT_SUITE["degrees"])
    checks = suite.get("checks", DEFAULT_SUITE["checks"])
    for name in checks:
        if name not in CHECKS:
            raise KeyError(f"unknown check {name!r}")
    for i in range(int(suite.get("instances", DEFAULT_SUITE["instances"]))):
        f, rng = suite_instance(seed, i, dims, degrees)
        for name, grid in checks.items():
            keys = CHECKS[name]
            for combo in itertools.product(*(grid[k] for k in keys)):
                rep = run_check(name, f, rng, **dict(zip(keys, combo)))
                rep.params["instance"] = i
                yield rep
