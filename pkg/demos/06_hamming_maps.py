"""Coordinatewise junta approximation of Hamming-Lipschitz maps."""
from linfjunta import QuadratureSpec
from linfjunta.geometry import hamming_junta_map, identity_map, random_smooth_map, sine_family
from linfjunta.junta import best_junta_oracle

for F in (identity_map(3), random_smooth_map(3, 4, seed=0)):
    J = hamming_junta_map(F, 0.2)
    print(F.metadata["family"], "L =", round(F.L, 3), "| I =", J.I, "| S =", J.S,
          "| total error =", round(J.total_error.value, 4))

# the last sine component genuinely needs all coordinates
F = sine_family(3)
for p in range(4):
    S, err = best_junta_oracle(F.components[-1], p, QuadratureSpec.grid(64))
    print(f"best {p}-junta of the sine component: S={S} error={err.value:.4f}")
