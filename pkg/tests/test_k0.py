import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from swkit.core import PreconditionError
from swkit.instances import cyclic_group, finset_instance, gset_instance
from swkit.k0 import (
    additivity_on_k0,
    check_biexact,
    check_class_additivity,
    integer_determinant,
    k0_group,
    k0_ring_product,
    presentation,
    smith_normal_form,
    verify_certificate,
)
from swkit.varieties import varieties_instance


def det_oracle(M):
    # Leibniz expansion
    n = len(M)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        total += sign * math.prod(M[i][perm[i]] for i in range(n))
    return total


def invariant_factors_oracle(M):
    """Invariant factors from gcds of k x k minors."""
    rows, cols = len(M), len(M[0]) if M else 0
    divisors = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for r in itertools.combinations(range(rows), k):
            for c in itertools.combinations(range(cols), k):
                g = math.gcd(g, det_oracle([[M[i][j] for j in c] for i in r]))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[k] // divisors[k - 1] for k in range(1, len(divisors))]


matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_certificate_and_oracle(M):
    form = smith_normal_form(M)
    verify_certificate(form)
    nonzero = [d for d in form.diagonal if d]
    assert nonzero == invariant_factors_oracle(M)
    inv = form.invariants
    assert inv.free_rank == len(M[0]) - len(nonzero)
    assert list(inv.torsion) == [d for d in nonzero if d != 1]


@settings(max_examples=60, deadline=None)
@given(matrices, st.randoms(use_true_random=False))
def test_snf_invariant_under_permutations(M, rnd):
    rows = list(M)
    rnd.shuffle(rows)
    perm = list(range(len(M[0])))
    rnd.shuffle(perm)
    P = [[r[j] for j in perm] for r in rows]
    assert smith_normal_form(P).invariants == smith_normal_form(M).invariants


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_bareiss_matches_leibniz(M):
    assert integer_determinant(M) == det_oracle(M)


def test_snf_fixed_examples():
    assert smith_normal_form([[2, 4], [6, 8]]).invariants.torsion == (2, 4)
    assert smith_normal_form([[1, 0, 0], [0, 1, 0], [0, 0, 1]]).invariants.free_rank == 0
    assert smith_normal_form([[0]]).invariants.free_rank == 1
    assert smith_normal_form([], cols=2).invariants.free_rank == 2


def test_tampered_certificate_is_rejected():
    import dataclasses

    form = smith_normal_form([[2, 4], [6, 8]])
    U = [list(r) for r in form.U]
    U[0][0] += 1
    with pytest.raises(AssertionError):
        verify_certificate(dataclasses.replace(form, U=tuple(map(tuple, U))))
    with pytest.raises(AssertionError):
        verify_certificate(dataclasses.replace(form, D=((4, 0), (0, 2))))


def test_finset_presentation_rows():
    P = presentation(finset_instance(2), None)
    assert P.generators == (0, 1, 2)
    assert sorted(P.relations) == sorted([(-1, 0, 0), (0, -2, 1)])


def test_finset_classes_are_sizes():
    G = k0_group(finset_instance(5), None)
    assert G.invariants.free_rank == 1 and G.invariants.torsion == ()
    assert [G.class_of_label(n) for n in range(6)] == [(n,) for n in range(6)]


def test_burnside_group_c2():
    G = k0_group(gset_instance(cyclic_group(2), 4), None)
    assert (G.invariants.free_rank, G.invariants.torsion) == (2, ())
    assert check_class_additivity(G, G.inst, None).ok


def test_class_of_beyond_window():
    inst = finset_instance(2)
    G = k0_group(inst, None)
    assert G.class_of(frozenset("abcde")) == (5,)


def test_varieties_class_is_point_count():
    V = varieties_instance(2, 2)
    G = k0_group(V, None)
    for X in V.window(None):
        assert G.class_of(X) == (len(X.points),)


def test_ring_table_finset():
    R = k0_ring_product(finset_instance(3), None)
    assert R.report.ok
    for m, n in itertools.product(range(4), repeat=2):
        assert R.multiply((m,), (n,)) == (m * n,)


def test_biexact_finset():
    assert check_biexact(finset_instance(2), None).ok


def test_additivity_verdict_gset():
    v = additivity_on_k0(gset_instance(cyclic_group(2), 2), None)
    assert v.homomorphism and v.surjective and v.isomorphism


def test_random_relation_sums():
    rng = random.Random(3)
    G = k0_group(finset_instance(4), None)
    for _ in range(50):
        a, b = rng.randint(0, 4), rng.randint(0, 4)
        assert G.add(G.class_of_label(a), G.scale(2, G.class_of_label(b))) == (a + 2 * b,)
