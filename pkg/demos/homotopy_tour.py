"""Build one homotopy step h_i by hand and check its identity table."""

import random

from swkit import additivity as add
from swkit.instances import finset_instance

inst = finset_instance(3)
rng = random.Random(5)
e = add.random_element(inst, rng, 2, 1)
print("element: m =", e.m, " n =", e.n)
for i in range(e.m + 1):
    h = add.homotopy_h(inst, i, e)
    print(f"h_{i}: degree {h.m}, valid = {add.validate_element(inst, h).ok}")

rep = add.verify_homotopy(inst, add.random_corpus(inst, 40, 1))
print("40 random elements:", "ok" if rep.ok else "FAILED", rep.notes[:2])
print(add.golden_appendix_text()[:400])
