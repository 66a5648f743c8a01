"""Separated sets with l_inf distance delta shrink to separated junta sets."""
from linfjunta.geometry import BoxSet, linf_distance, random_separated_boxes, separated_junta_sets

A = BoxSet.single([[0.0, 0.3], [0.0, 1.0]])
B = BoxSet.single([[0.7, 1.0], [0.0, 1.0]])
S, G, rep = separated_junta_sets(A, B, delta=0.4, epsilon=0.1)
print("half-spaces: S =", S, rep.to_dict())

A, B = random_separated_boxes(3, 0.35, seed=2)
print("random pair at distance", round(linf_distance(A, B), 4))
S, G, rep = separated_junta_sets(A, B, delta=0.35, epsilon=0.1)
print("S =", S, " losses", round(rep.loss_A.value, 4), round(rep.loss_B.value, 4),
      " separation", round(rep.separation, 4), " passed", rep.passed)
