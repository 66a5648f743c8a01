"""Junta extraction by influence thresholding.

The pipeline: measure the per-coordinate gradient mass ||d_n f||_1, keep the
coordinates whose mass reaches a threshold eta, and project onto them with
the conditional expectation E_S.  ``select_parameters`` produces the
smoothing time t and threshold eta, either with the worst-case guarantee
(``"certified"``) or calibrated on the function itself (``"empirical"``).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Union

import numpy as np

from .quadrature import (Estimate, FnHandle, InfluenceProfile, QuadratureSpec,
                         as_handle, finite_diff_influences, grid_cond_exp,
                         grid_cond_exp_values, lp_norm_est, trig_partial_l1)
from .torus import TrigPoly, centered_l2_norm, coord_set, cond_exp, partial_l2_norms

Function = Union[TrigPoly, FnHandle]
MODES = ("certified", "empirical")
ORACLE_GUARD = 10_000


def exponents(t: float) -> tuple[float, float]:
    """(a, b) with a = e^{-2t}/(1+e^{-2t}), b = (1-e^{-2t})/(2(1+e^{-2t}))."""
    u = math.exp(-2.0 * t)
    return u / (1.0 + u), (1.0 - u) / (2.0 * (1.0 + u))


def smoothed_junta_bound(t: float, eta: float) -> float:
    """t^{-a} eta^{b}: bound on ||P_{2t} f - E_S P_{2t} f||_2."""
    a, b = exponents(t)
    if eta <= 0:
        return 0.0
    return t ** (-a) * eta ** b


@dataclass(frozen=True)
class ParamSchedule:
    epsilon: float
    t: float
    eta: Optional[float]
    a: float
    b: float
    mode: str
    log_eta: Optional[float] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.t <= 0:
            raise ValueError("t must be positive")
        if self.mode == "certified" and not self.t < self.epsilon**2 / 32:
            raise ValueError("certified schedules need t < eps^2/32")
        if self.eta is not None and self.eta < 0:
            raise ValueError("eta must be positive")

    @property
    def smoothing_bound(self) -> float:
        """2 sqrt(2t): twice the L1 cost of smoothing a unit-mass function."""
        return 2.0 * math.sqrt(2.0 * self.t)

    @property
    def projection_bound(self) -> Optional[float]:
        if self.log_eta is None:
            return None if self.eta is None else smoothed_junta_bound(self.t, self.eta)
        return math.exp(-self.a * math.log(self.t) + self.b * self.log_eta)

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "t": self.t, "eta": self.eta,
                "log10_eta": None if self.log_eta is None else self.log_eta / math.log(10),
                "a": self.a, "b": self.b, "mode": self.mode}


def select_parameters(epsilon: float, mode: str = "empirical",
                      eta: Optional[float] = None) -> ParamSchedule:
    """Smoothing time t = eps^2/64 and a threshold eta.

    Certified mode sets eta = ((eps/2) t^a)^{1/b} / 2, which makes
    t^{-a} eta^b strictly smaller than eps/2.  The value is held in log form
    since it underflows for all practical eps.  Empirical mode leaves eta
    unset (it is calibrated per function by :func:`extract_junta`) unless one
    is supplied.
    """
    if not 0 < epsilon <= 2:
        raise ValueError("epsilon must lie in (0, 2]")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    t = epsilon**2 / 64.0
    a, b = exponents(t)
    if mode == "certified":
        log_eta = (math.log(epsilon / 2.0) + a * math.log(t)) / b - math.log(2.0)
        return ParamSchedule(epsilon, t, math.exp(log_eta), a, b, mode, log_eta)
    log_eta = math.log(eta) if eta else None
    return ParamSchedule(epsilon, t, eta, a, b, mode, log_eta)


# -- influences and errors -------------------------------------------------

def default_quad(f: Function) -> QuadratureSpec:
    return QuadratureSpec.grid_for(f.dim)


def influences(f: Function, quad: QuadratureSpec | None = None) -> InfluenceProfile:
    """Influence profile; exact L2 parts for trig polynomials."""
    quad = quad or default_quad(f)
    if isinstance(f, TrigPoly):
        l1, hw = trig_partial_l1(f, quad)
        l2 = partial_l2_norms(f)
        return InfluenceProfile(l1, hw, l2, np.zeros_like(l2))
    return finite_diff_influences(f, quad=quad)


class _ErrorTable:
    """Caches grid values of f so that ||f - E_S f||_1 is cheap for many S."""

    def __init__(self, f: Function, quad: QuadratureSpec):
        self.f = f
        self.quad = quad
        self.dim = f.dim
        self.grids = []
        if quad.scheme == "grid":
            h = as_handle(f)
            for q in (quad, quad.coarse()):
                if q is None:
                    continue
                # grid averaging reproduces E_S exactly for trig polys of degree < M
                if isinstance(f, TrigPoly) and max(f.degrees, default=0) >= q.count:
                    self.grids.append(None)
                else:
                    self.grids.append(h.on_grid([q.axis_nodes()] * f.dim))
        elif not isinstance(f, TrigPoly):
            raise ValueError("junta errors of black-box functions need grid quadrature")
        self._memo = {}

    def __call__(self, S) -> Estimate:
        S = coord_set(S, self.dim)
        if S in self._memo:
            return self._memo[S]
        if self.quad.scheme == "mc" or any(g is None for g in self.grids):
            est = lp_norm_est(self.f - cond_exp(self.f, S), 1, self.quad)
        else:
            vals = [float(np.mean(np.abs(V - grid_cond_exp_values(V, S)))) for V in self.grids]
            hw = abs(vals[0] - vals[1]) if len(vals) > 1 else float("inf")
            est = Estimate(vals[0], hw)
        self._memo[S] = est
        return est


def junta_error(f: Function, S: Iterable[int], quad: QuadratureSpec | None = None) -> Estimate:
    """||f - E_S f||_1 with a half-width."""
    quad = quad or default_quad(f)
    return _ErrorTable(f, quad)(S)


def best_junta_oracle(f: Function, p: int, quad: QuadratureSpec | None = None):
    """Exhaustive minimum of ||f - E_S f||_1 over |S| <= p.

    Returns ``(S, error)``.  Ties go to the smaller, then lexicographically
    first, set.
    """
    quad = quad or default_quad(f)
    p = min(int(p), f.dim)
    count = sum(math.comb(f.dim, k) for k in range(p + 1))
    if count > ORACLE_GUARD:
        raise ValueError(f"oracle would enumerate {count} subsets (limit {ORACLE_GUARD})")
    table = _ErrorTable(f, quad)
    best_S, best = (), table(())
    for k in range(1, p + 1):
        for S in itertools.combinations(range(f.dim), k):
            err = table(S)
            if err.value < best.value:
                best_S, best = S, err
    return best_S, best


# -- extraction ------------------------------------------------------------

@dataclass(frozen=True)
class JuntaApproximation:
    S: tuple
    projection: Function
    l1_error: Estimate
    schedule: ParamSchedule
    rescaling: float = 1.0
    profile: Optional[InfluenceProfile] = field(default=None, repr=False)
    theoretical_bound: Optional[float] = None
    size_bound: Optional[float] = None
    notes: tuple = ()

    def depends_only_on_S(self) -> bool:
        proj = self.projection
        if isinstance(proj, TrigPoly):
            return set(proj.support()) <= set(self.S)
        return True

    def to_report(self) -> dict:
        sch = self.schedule
        return {
            "S": list(self.S),
            "eta": sch.eta,
            "log10_eta": None if sch.log_eta is None else sch.log_eta / math.log(10),
            "t": sch.t,
            "epsilon": sch.epsilon,
            "mode": sch.mode,
            "l1_error": self.l1_error.value,
            "half_width": self.l1_error.half_width,
            "size_bound": self.size_bound,
            "rescaling": self.rescaling,
            "theoretical_bound": self.theoretical_bound,
            "notes": list(self.notes),
        }


def _threshold(I: np.ndarray, hw: np.ndarray, eta: float) -> tuple:
    # coordinates within a half-width of eta count as reaching it
    return tuple(int(n) for n in np.flatnonzero(I >= eta - hw))


def _centered_l2(f: Function, quad: QuadratureSpec) -> float:
    if isinstance(f, TrigPoly):
        return centered_l2_norm(f)
    h = as_handle(f)
    if quad.scheme == "grid":
        V = h.on_grid([quad.axis_nodes()] * f.dim)
        return float(np.std(V))
    from .quadrature import nodes
    return float(np.std(h(nodes(quad, f.dim))))


def extract_junta(f: Function, epsilon: float, schedule: ParamSchedule | None = None,
                  quad: QuadratureSpec | None = None) -> JuntaApproximation:
    """Threshold influences and project f onto the surviving coordinates.

    Inputs are normalised to unit gradient mass and unit centred L2 norm
    (dividing by c >= 1); errors are reported in the original units and c is
    recorded as ``rescaling``.  In empirical mode eta is the largest
    threshold whose measured error stays below ``epsilon`` (original units).
    """
    schedule = schedule or select_parameters(epsilon, "empirical")
    quad = quad or default_quad(f)
    if isinstance(f, TrigPoly) and f.is_zero():
        raise ValueError("cannot extract a junta from the empty function")
    profile = influences(f, quad)
    if not np.all(np.isfinite(profile.l1)):
        raise FloatingPointError("influence estimation failed")
    # transferring a cube function to the torus doubles its gradient mass
    factor = 2.0 if isinstance(f, FnHandle) and f.domain == "cube" else 1.0
    mass = factor * (profile.total.value + profile.total.half_width)
    c = max(1.0, mass, _centered_l2(f, quad))
    I = factor * profile.l1 / c
    hw = factor * profile.l1_half_width / c
    notes = []
    if c > 1.0:
        notes.append(f"input rescaled by 1/{c:.6g} to meet the normalisation")

    table = _ErrorTable(f, quad)
    if schedule.mode == "empirical" and schedule.eta is None:
        top = float(np.max(I + hw)) if len(I) else 0.0
        candidates = [top * (1 + 1e-9) + 1e-12] + sorted(set(float(v) for v in I), reverse=True)
        # S grows as eta falls; the last candidate keeps every coordinate
        lo, hi = 0, len(candidates) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if table(_threshold(I, hw, candidates[mid])).value < epsilon:
                hi = mid
            else:
                lo = mid + 1
        eta = candidates[hi]
        schedule = replace(schedule, eta=eta, log_eta=math.log(eta) if eta > 0 else None)
        S = _threshold(I, hw, eta)
    else:
        eta = schedule.eta or 0.0
        S = _threshold(I, hw, eta)
        if eta == 0.0:
            notes.append("eta underflows double precision; every coordinate passes the threshold")

    if isinstance(f, TrigPoly):
        projection = cond_exp(f, S)
    else:
        projection = grid_cond_exp(f, S, quad)
    err = table(S)

    bound = size_bound = None
    if schedule.mode == "certified":
        bound = c * (schedule.smoothing_bound + schedule.projection_bound)
        inv = -schedule.log_eta
        size_bound = math.ceil(math.exp(inv)) if inv < 700 else None
        if size_bound is None:
            notes.append(f"|S| <= 1/eta = 10^{inv / math.log(10):.4g}")
    return JuntaApproximation(S, projection, err, schedule, c, profile, bound,
                              size_bound, tuple(notes))


def size_certificate(S: Iterable[int], log_eta: float) -> bool:
    """eta * |S| <= 1, checked in log space."""
    S = tuple(S)
    if not S:
        return True
    return log_eta + math.log(len(S)) <= 0.0
