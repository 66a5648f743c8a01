"""Lipschitz regularization of a function on a finite metric space."""
import numpy as np

from linfjunta.regularize import FiniteMetricSpace, lipschitz_regularize, modulus_of

rng = np.random.default_rng(0)
space = FiniteMetricSpace.from_coordinates(rng.random((20, 2)), "linf")
f = np.sign(rng.normal(size=20)) * rng.random(20)
omega = modulus_of(space, f)
for eps in (0.5, 0.2, 0.05):
    res = lipschitz_regularize(space, f, omega, eps)
    print(f"eps={eps:<5} K={res.K:8.3f}  Lip(h)={res.lipschitz:8.3f}  max|f-h|={res.sup_error:.4f}"
          f"  (<= K eps = {res.K * eps:.4f})")
