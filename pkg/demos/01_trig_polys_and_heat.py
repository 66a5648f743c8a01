"""Trigonometric polynomials on the torus and the heat semigroup.

Builds f(x) = cos(2 pi x1) + 0.3 cos(2 pi (x1 + 2 x2)), smooths it with the
heat semigroup and shows that the exact Fourier multiplier and the
Monte-Carlo Gaussian convolution agree.
"""
import numpy as np

from linfjunta import QuadratureSpec, TrigPoly, cond_exp, grad_norm, heat, l2_norm
from linfjunta.quadrature import heat_gaussian

f = TrigPoly.cosine(2, (1, 0)) + TrigPoly.cosine(2, (1, 2), 0.3)
print("f has", len(f), "Fourier terms; ||f||_2 =", round(l2_norm(f), 6))

for t in (0.0, 0.01, 0.05):
    g = heat(f, t)
    print(f"t={t:<5} ||P_t f||_2 = {l2_norm(g):.6f}   ||grad P_t f||_1 = "
          f"{grad_norm(g, 1, QuadratureSpec.grid(64)).value:.6f}")

# conditional expectation onto x1 drops the mixed mode
print("E_{x1} f =", cond_exp(f, [0]).to_text().splitlines()[1:])

# the Gaussian-convolution convention at time 2t matches heat(., t)
t = 0.02
mc = heat_gaussian(f, 2 * t, 4096, seed=0)
X = np.random.default_rng(1).random((5, 2))
vals, hw = mc.evaluate_with_error(X)
print("multiplier:", np.round(heat(f, t)(X), 4))
print("gaussian  :", np.round(vals, 4), "+/-", np.round(hw, 4))
