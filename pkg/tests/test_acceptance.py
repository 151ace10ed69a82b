import itertools
import random
import time

from swkit import additivity as add
from swkit.core import check_sw_axioms, check_subtraction_axioms, check_subtractive_axioms
from swkit.functors import check_op_w_exact, check_splitting, check_w_exact, point_count_functor, unit_functor
from swkit.instances import cyclic_group, finset_instance, gset_instance
from swkit.k0 import additivity_on_k0, check_biexact, k0_group, k0_ring_product, verify_certificate
from swkit.sdot import check_simplicial_identities, enumerate_flags
from swkit.varieties import (
    Poly,
    closed_subset,
    constructible,
    enumerate_points,
    enumerate_points_numpy,
    product,
    subtraction_sequence_of,
    varieties_instance,
)


def _random_poly(rng, p, n, terms=3, deg=3):
    d = {}
    for _ in range(rng.randint(1, terms)):
        e = tuple(rng.randint(0, deg) for _ in range(n))
        d[e] = (d.get(e, 0) + rng.randint(1, p - 1)) % p
    return Poly.from_dict(p, n, {e: c for e, c in d.items() if c})


def _random_set(rng, p, n):
    eqs = [_random_poly(rng, p, n) for _ in range(rng.randint(0, 1))]
    neqs = [_random_poly(rng, p, n) for _ in range(rng.randint(0, 1))]
    return constructible(p, n, eqs, neqs)


def _grid_count(system):
    # third route: plain loop, no shared helper
    p, n = system.prime, system.num_vars
    return sum(
        1
        for x in itertools.product(range(p), repeat=n)
        if all(f(x) == 0 for f in system.equations) and all(g(x) != 0 for g in system.inequations)
    )


def test_01_axiom_suites(record):
    t = time.time()
    cases = [
        (finset_instance(3), None),
        (gset_instance(cyclic_group(2), 4), None),
        (varieties_instance(2, 1), None),
        (varieties_instance(2, 2), None),
        (varieties_instance(3, 1), None),
        (varieties_instance(3, 2), 2),
    ]
    bad = []
    for inst, bound in cases:
        for suite in (check_subtraction_axioms, check_subtractive_axioms, check_sw_axioms):
            rep = suite(inst, bound)
            if not rep.ok:
                bad.append((inst.name, suite.__name__, rep.axioms_violated()))
    secs = time.time() - t
    ok = not bad and secs < 60
    record("1 axiom suites", ok, f"{len(cases)} instances x 3 suites, violations={bad}, {secs:.1f}s (F3^2 at bound 2)")
    assert ok


def test_02_simplicial_identities(record):
    inst = finset_instance(3)
    flags = [F for n in range(5) for F in enumerate_flags(inst, n, None)]
    rep = check_simplicial_identities(inst, flags)
    record("2 simplicial identities", rep.ok, f"{len(flags)} flags of degree <= 4, {len(rep.violations)} failures")
    assert rep.ok


def test_03_k0_groups(record):
    out = []
    G = k0_group(finset_instance(5), None)
    out.append(
        G.invariants.free_rank == 1
        and not G.invariants.torsion
        and all(G.class_of_label(n) == (n,) for n in range(6))
    )
    B = k0_group(gset_instance(cyclic_group(2), 4), None)
    out.append(B.invariants.free_rank == 2 and not B.invariants.torsion)
    groups = [G, B]
    for n in (1, 2):
        V = varieties_instance(3, n)
        K = k0_group(V, None)
        out.append(
            K.invariants.free_rank == 1
            and not K.invariants.torsion
            and all(K.class_of(X) == (len(enumerate_points(X.system)),) for X in V.window(None))
        )
        groups.append(K)
    certs = 0
    for K in groups:
        verify_certificate(K.snf)
        certs += 1
    ok = all(out) and certs == len(groups)
    record("3 k0 groups", ok, f"finset/C2-sets/F3^1/F3^2 checks={out}, certificates verified={certs}")
    assert ok


def test_04_motivic_relations(record):
    rng = random.Random(2024)
    done = bad = 0
    while done < 120:
        p = rng.choice([3, 5])
        n = rng.randint(1, 2)
        Y = _random_set(rng, p, n)
        X, c = closed_subset(Y, [_random_poly(rng, p, n)])
        _, o = subtraction_sequence_of(c)
        U = o.source
        for route in (lambda s: len(enumerate_points(s)), lambda s: len(enumerate_points_numpy(s)), _grid_count):
            if route(Y.system) != route(X.system) + route(U.system):
                bad += 1
        done += 1
    record("4 motivic relations", bad == 0, f"{done} closed immersions over F3/F5, three counting routes, {bad} failures")
    assert bad == 0


def test_05_w_exactness(record):
    reps = []
    for p, n, bound in [(2, 1, None), (2, 2, None), (3, 1, None), (3, 2, 4)]:
        reps.append(check_w_exact(point_count_functor(varieties_instance(p, n)), bound))
    for target in (varieties_instance(2, 3), gset_instance(cyclic_group(2), 6)):
        reps.append(check_op_w_exact(unit_functor(target, max_size=6), max_size=6))
    ok = all(r.ok for r in reps)
    record("5 w-exactness", ok, f"{len(reps)} reports ok={[r.ok for r in reps]} (F3^2 squares within 4 points)")
    assert ok


def test_06_splitting(record):
    v = check_splitting(max_size=6)
    record("6 splitting", v.strict, f"objects={v.objects_checked}, morphisms={v.morphisms_checked}, strict={v.strict}")
    assert v.strict


def test_07_homotopy_identities(record):
    t = time.time()
    ex = add.verify_homotopy(finset_instance(2), add.exhaustive_corpus(finset_instance(2), 2, 2))
    inst3 = finset_instance(3)
    rnd = add.verify_homotopy(inst3, add.random_corpus(inst3, 500, 7))
    secs = time.time() - t
    ok = ex.ok and rnd.ok and secs < 300
    n_ids = add.identities_checked(ex) + add.identities_checked(rnd)
    record(
        "7 homotopy identities",
        ok,
        f"exhaustive {ex.notes[0]} + random {rnd.notes[0]}, {n_ids} identity checks, "
        f"{len(ex.violations) + len(rnd.violations)} failures, {secs:.0f}s",
    )
    assert ok


def test_08_additivity_on_k0(record):
    vs = [additivity_on_k0(finset_instance(3), None), additivity_on_k0(gset_instance(cyclic_group(2), 3), None)]
    ok = all(v.isomorphism for v in vs)
    record("8 additivity on k0", ok, "; ".join(f"{v.source.to_json()} -> {v.target.to_json()} iso={v.isomorphism}" for v in vs))
    assert ok


def test_09_golden_appendix(record):
    ok = add.golden_appendix_text() == add.stored_appendix_text()
    record("9 golden appendix", ok, "h_3 slot grids for the 5-simplex, byte comparison")
    assert ok


def test_10_k0_ring(record):
    V1 = varieties_instance(3, 1)
    R = k0_ring_product(V1, None)
    G1 = R.group
    G2 = k0_group(varieties_instance(3, 2), None)
    rng = random.Random(10)
    bad = 0
    for _ in range(50):
        X, Y = _random_set(rng, 3, 1), _random_set(rng, 3, 1)
        P = product(X, Y)
        via_ring = R.multiply(G1.class_of(X), G1.class_of(Y))
        via_product = G2.class_of(P)
        count = _grid_count(P.system)
        if not (via_ring == via_product == (count,) and count == len(X) * len(Y)):
            bad += 1
    bis = [check_biexact(inst, None) for inst in (finset_instance(3), gset_instance(cyclic_group(2), 3), V1, varieties_instance(2, 2))]
    ok = bad == 0 and R.report.ok and all(b.ok for b in bis)
    record("10 k0 ring", ok, f"50 random F3 pairs, {bad} mismatches; biexactness ok={[b.ok for b in bis]}")
    assert ok
