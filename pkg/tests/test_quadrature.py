import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from linfjunta.quadrature import (FnHandle, QuadratureSpec, as_handle, finite_diff_influences,
                                  grid_cond_exp, grid_cond_exp_values, heat_gaussian, lp_norm_est,
                                  mean_est, nodes, probability_est, read_grid_dump, tent_map,
                                  tent_transfer, write_grid_dump)
from linfjunta.torus import TrigPoly, grad_norm

from conftest import trig_polys

COS = TrigPoly.cosine(1, [1])


def cube(fn, dim, grad=None):
    return FnHandle(dim, "cube", fn, grad)


# -- specs -----------------------------------------------------------------

def test_spec_validation_and_defaults():
    with pytest.raises(ValueError):
        QuadratureSpec("grid", 0)
    with pytest.raises(ValueError):
        QuadratureSpec("simpson", 8)
    assert QuadratureSpec.default(3).scheme == "grid" and QuadratureSpec.default(3).count == 64
    assert QuadratureSpec.default(4).scheme == "mc" and QuadratureSpec.default(4).count == 2**16
    assert QuadratureSpec.grid(8).axis_nodes().tolist() == [(i + 0.5) / 8 for i in range(8)]


def test_mc_nodes_are_deterministic():
    q = QuadratureSpec.mc(100, seed=3)
    assert np.array_equal(nodes(q, 2), nodes(q, 2))
    assert not np.array_equal(nodes(q, 2), nodes(QuadratureSpec.mc(100, seed=4), 2))


# -- lp norms ----------------------------------------------------------------

@pytest.mark.parametrize("quad", [QuadratureSpec.grid(16), QuadratureSpec.mc(1000, 1)])
def test_constant_norm_exact(quad):
    est = lp_norm_est(TrigPoly.constant(2, -1.25), 1.5, quad)
    assert est.value == pytest.approx(1.25, abs=1e-15) and est.half_width == pytest.approx(0, abs=1e-15)


def test_p_below_one_rejected():
    with pytest.raises(ValueError):
        lp_norm_est(COS, 0.5, QuadratureSpec.grid(8))


@pytest.mark.parametrize("quad", [QuadratureSpec.grid(64), QuadratureSpec.mc(2**16, 0)])
def test_cosine_l1(quad):
    est = lp_norm_est(COS, 1, quad)
    assert abs(est.value - 2 / math.pi) <= est.half_width


def test_grid_refinement_monotone():
    h = FnHandle(1, "torus", lambda X: np.exp(np.sin(2 * np.pi * X[:, 0])))
    truth = math.sqrt(integrate.quad(lambda x: math.exp(2 * math.sin(2 * math.pi * x)), 0, 1,
                                     epsabs=1e-14)[0])
    errs = [abs(lp_norm_est(h, 2, QuadratureSpec.grid(m)).value - truth) for m in (2, 4, 8, 16, 32)]
    assert all(b <= a + 1e-15 for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-12


def test_mc_half_width_scales():
    h = as_handle(COS)
    hws = [lp_norm_est(h, 1, QuadratureSpec.mc(n, 5)).half_width for n in (4000, 8000, 16000)]
    for a, b in zip(hws, hws[1:]):
        assert 0.5 < (a / b) / math.sqrt(2) < 2.0


def test_mean_est():
    h = cube(lambda X: X.sum(axis=1), 2)
    assert mean_est(h, QuadratureSpec.grid(8)).value == pytest.approx(1.0)


def test_probability_needs_mc():
    with pytest.raises(ValueError):
        probability_est(COS, lambda v: v > 0, QuadratureSpec.grid(8))


# -- influences --------------------------------------------------------------

def test_influence_of_unused_coordinate_is_zero():
    h = FnHandle(2, "torus", lambda X: np.cos(2 * np.pi * X[:, 0]))
    prof = finite_diff_influences(h, quad=QuadratureSpec.grid(64))
    assert prof.l1[1] == 0.0
    assert abs(prof.l1[0] - 4.0) <= prof.l1_half_width[0]


def test_influences_sum_to_grad_norm():
    f = TrigPoly.cosine(2, (1, 1), 0.5) + TrigPoly.cosine(2, (0, 2), 0.2)
    black_box = FnHandle(2, "torus", f)
    q = QuadratureSpec.grid(64)
    prof = finite_diff_influences(black_box, quad=q)
    g = grad_norm(f, 1, q)
    assert prof.total.value == pytest.approx(g.value, abs=1e-6 + g.half_width + prof.total.half_width)


def test_influences_use_analytic_gradient():
    h = cube(lambda X: X[:, 0] ** 2, 2, lambda X: np.stack([2 * X[:, 0], 0 * X[:, 1]], axis=1))
    prof = finite_diff_influences(h, quad=QuadratureSpec.grid(64))
    assert prof.l1 == pytest.approx([1.0, 0.0], abs=1e-12)


def test_cube_stencil_stays_inside():
    seen = []

    def fn(X):
        seen.append(X.copy())
        return X[:, 0]
    finite_diff_influences(cube(fn, 1), step=0.01, quad=QuadratureSpec.grid(4))
    pts = np.concatenate(seen)
    assert pts.min() >= 0.0 and pts.max() <= 1.0


def test_non_finite_values_raise():
    h = cube(lambda X: np.where(X[:, 0] > 0.5, np.nan, 0.0), 1)
    with pytest.raises(FloatingPointError):
        finite_diff_influences(h, quad=QuadratureSpec.grid(8))


def test_bad_step():
    with pytest.raises(ValueError):
        finite_diff_influences(COS, step=0.0)


# -- grid conditional expectation -------------------------------------------

def test_grid_cond_exp_full_set_is_identity():
    h = cube(lambda X: X.prod(axis=1), 2)
    assert grid_cond_exp(h, [0, 1], QuadratureSpec.grid(8)) is h


def test_grid_cond_exp_sum():
    g = grid_cond_exp(cube(lambda X: X[:, 0] + X[:, 1], 2), [0], QuadratureSpec.grid(16))
    x = np.array([[0.1, 0.9], [0.7, 0.2]])
    assert np.allclose(g(x), x[:, 0] + 0.5, atol=1e-12)


def test_grid_cond_exp_max():
    q = QuadratureSpec.grid(128)
    g = grid_cond_exp(cube(lambda X: X.max(axis=1), 2), [0], q)
    x = np.array([[0.05, 0.3], [0.5, 0.0], [0.93, 0.6]])
    assert np.allclose(g(x), (1 + x[:, 0] ** 2) / 2, atol=q.mesh**2)


def test_grid_cond_exp_needs_grid():
    with pytest.raises(ValueError):
        grid_cond_exp(COS, [0], QuadratureSpec.mc(10))


def test_grid_cond_exp_idempotent_on_grid():
    q = QuadratureSpec.grid(8)
    h = cube(lambda X: np.sin(3 * X[:, 0]) * X[:, 1] + X[:, 2] ** 2, 3)
    g = grid_cond_exp(h, [1], q)
    gg = grid_cond_exp(g, [1], q)
    axes = [q.axis_nodes()] * 3
    assert np.allclose(g.on_grid(axes), gg.on_grid(axes), atol=1e-14)
    pts = nodes(q, 3)
    assert np.allclose(g(pts), g.on_grid(axes).ravel(), atol=1e-14)


@given(st.permutations([0, 1, 2]))
def test_grid_average_order_invariant(order):
    V = np.random.default_rng(0).random((4, 5, 6, 3))
    W = V
    for ax in sorted(order[:2], reverse=True):
        W = W.mean(axis=ax, keepdims=True)
    want = grid_cond_exp_values(V, [n for n in range(4) if n not in order[:2]])
    assert np.allclose(np.broadcast_to(W, V.shape), np.broadcast_to(want, V.shape), atol=1e-15)


# -- tent map ----------------------------------------------------------------

def test_tent_values():
    assert tent_map(0.25) == 0.5 and tent_map(0.75) == 0.5
    assert tent_map(0.0) == 0.0 and tent_map(0.5) == 1.0


def test_tent_pushforward_moments():
    U = nodes(QuadratureSpec.mc(2**16, 2), 1)[:, 0]
    V = tent_map(U)
    for k, want in ((1, 0.5), (2, 1 / 3)):
        v = V**k
        hw = 2.5758 * v.std(ddof=1) / math.sqrt(len(v))
        assert abs(v.mean() - want) <= hw


def test_tent_needs_cube():
    with pytest.raises(ValueError):
        tent_transfer(as_handle(COS))


def smooth_cube(dim=2):
    def fn(X):
        return np.sin(2 * X[:, 0]) * np.cos(X[:, -1]) + X[:, 0] * X[:, -1]
    return cube(fn, dim)


def test_tent_commutes_with_grid_cond_exp():
    h = smooth_cube(3)
    S = [0, 2]
    lhs = tent_transfer(grid_cond_exp(h, S, QuadratureSpec.grid(8)))
    rhs = grid_cond_exp(tent_transfer(h), S, QuadratureSpec.grid(16))
    X = nodes(QuadratureSpec.grid(16), 3)
    assert np.allclose(lhs(X), rhs(X), atol=1e-13)


def test_tent_preserves_norms_and_doubles_influences():
    h = smooth_cube()
    T = tent_transfer(h)
    q = QuadratureSpec.grid(64)
    for p in (1, 2):
        a, b = lp_norm_est(h, p, q), lp_norm_est(T, p, QuadratureSpec.grid(128))
        assert abs(a.value - b.value) <= a.half_width + b.half_width + 1e-9
    ih = finite_diff_influences(h, quad=q)
    it = finite_diff_influences(T, quad=QuadratureSpec.grid(128))
    assert np.all(it.l1 <= 2 * ih.l1 + 2 * ih.l1_half_width + it.l1_half_width + 1e-3)


# -- Gaussian smoothing ------------------------------------------------------

def test_heat_gaussian_constant_exact():
    g = heat_gaussian(TrigPoly.constant(2, 3.0), 0.5, 17, seed=1)
    assert np.all(g(np.random.default_rng(0).random((10, 2))) == 3.0)


def test_heat_gaussian_cosine_multiplier():
    s = 0.2
    g = heat_gaussian(COS, s, 4096, seed=2)
    val, hw = g.evaluate_with_error(np.zeros((1, 1)))
    assert abs(val[0] - math.exp(-2 * math.pi**2 * s)) <= hw[0]


def test_heat_gaussian_errors():
    with pytest.raises(ValueError):
        heat_gaussian(COS, -1.0, 10)
    with pytest.raises(ValueError):
        heat_gaussian(COS, 1.0, 0)


# -- handles and dumps -------------------------------------------------------

def test_periodicity_check():
    assert as_handle(COS).check_periodic()
    assert not FnHandle(1, "torus", lambda X: X[:, 0]).check_periodic()


def test_grid_dump_round_trip(tmp_path):
    h = smooth_cube()
    q = QuadratureSpec.grid(6)
    write_grid_dump(h, q, tmp_path / "h.csv")
    back = read_grid_dump(tmp_path / "h.csv")
    X = nodes(q, 2)
    assert np.allclose(back(X), h(X), atol=1e-15)


@given(trig_polys(max_dim=2))
def test_trigpoly_handle_matches_poly(f):
    h = as_handle(f)
    X = np.random.default_rng(1).random((7, f.dim))
    assert np.allclose(h(X), f(X))
