"""Black-box integration on the cube and the tent transfer to the torus."""
import math

import numpy as np

from linfjunta import QuadratureSpec, lp_norm_est
from linfjunta.quadrature import FnHandle, finite_diff_influences, tent_transfer
from linfjunta.specs import max_function

h = max_function(3)
for q in (QuadratureSpec.grid(32), QuadratureSpec.mc(2**15, seed=0)):
    est = lp_norm_est(h, 1, q)
    print(f"{q.scheme:4} E[max(x)] ~ {est.value:.5f} +/- {est.half_width:.5f}   (exact 0.75)")

# the tent map x -> 1 - |2x - 1| pulls a cube function back to a periodic one
g = FnHandle(2, "cube", lambda X: np.sin(3 * X[:, 0]) + X[:, 1] ** 2, name="g")
T = tent_transfer(g)
q = QuadratureSpec.grid(64)
print("||g||_2 =", round(lp_norm_est(g, 2, q).value, 6),
      " ||g o tent||_2 =", round(lp_norm_est(T, 2, QuadratureSpec.grid(128)).value, 6))
print("influences of g       :", np.round(finite_diff_influences(g, quad=q).l1, 4))
print("influences of g o tent:",
      np.round(finite_diff_influences(T, quad=QuadratureSpec.grid(128)).l1, 4), "(at most doubled)")
