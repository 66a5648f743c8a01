"""Junta extraction: find a few coordinates that explain f in L1."""
from linfjunta import extract_junta, influences, select_parameters
from linfjunta.inequalities import RandomPolySpec, random_trigpoly
from linfjunta.junta import best_junta_oracle
from linfjunta.specs import two_mode

f = two_mode(4)
print("two-mode influences:", [round(float(v), 4) for v in influences(f).l1])
J = extract_junta(f, 0.05)
print("empirical S =", J.S, " L1 error =", J.l1_error.value)

g = random_trigpoly(RandomPolySpec(dim=4, degree=2, scale=1.0, seed=7))
for eps in (0.03, 0.01, 0.003):
    J = extract_junta(g, eps)
    S_or, err = best_junta_oracle(g, len(J.S))
    print(f"eps={eps:<5} S={J.S}  error={J.l1_error.value:.4f}  oracle({len(J.S)})={err.value:.4f} on {S_or}")

# the certified schedule gives a provable bound, with a tiny threshold
sch = select_parameters(0.5, "certified")
J = extract_junta(g, 0.5, sch)
print("certified: t =", sch.t, " log10(eta) =", round(J.to_report()["log10_eta"], 1),
      " |S| =", len(J.S), " bound =", J.theoretical_bound)
