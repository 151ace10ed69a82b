"""Grothendieck groups of a few small categories, computed by Smith form."""

from swkit.instances import cyclic_group, finset_instance, gset_instance
from swkit.k0 import additivity_on_k0, k0_group, k0_ring_product
from swkit.varieties import varieties_instance


def show(title, G):
    inv = G.invariants
    print(f"{title}: free rank {inv.free_rank}, torsion {list(inv.torsion)}")
    for label, cls in G.class_table()[:6]:
        print(f"  [{label}] = {cls}")


show("finite sets up to 5", k0_group(finset_instance(5), None))
show("C2-sets up to 4", k0_group(gset_instance(cyclic_group(2), 4), None))
show("subsets of F3^2", k0_group(varieties_instance(3, 2), None))

R = k0_ring_product(varieties_instance(3, 1), None)
print("[2 points] * [3 points] =", R.multiply((2,), (3,)))

v = additivity_on_k0(finset_instance(3), None)
print("sequences vs pairs:", v.source.to_json(), "->", v.target.to_json(), "iso:", v.isomorphism)
