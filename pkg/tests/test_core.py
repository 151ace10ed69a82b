import itertools

import pytest
from hypothesis import given, settings, strategies as st

from swkit.core import (
    CheckReport,
    Morphism,
    PreconditionError,
    TabulatedInstance,
    build_f1_plus,
    check_subtraction_axioms,
    check_subtractive_axioms,
    check_sw_axioms,
)
from swkit.instances import counterexample, cyclic_group, finset_instance, gset_instance


def suites(inst, bound=None):
    return [f(inst, bound) for f in (check_subtraction_axioms, check_subtractive_axioms, check_sw_axioms)]


def test_finset_small_axioms_clean():
    for r in suites(finset_instance(2)):
        assert r.ok, r.to_json()
        assert sum(r.checked.values()) > 0


@pytest.mark.parametrize(
    "kind",
    ["identity-not-cofibration", "missing-subtraction", "noncartesian-pushout", "nongluing-weq"],
)
def test_counterexamples_are_caught(kind):
    inst = counterexample(kind)
    bad = [r for r in suites(inst) if not r.ok]
    assert bad, f"{kind} passed every suite"


def test_report_ordering_is_deterministic():
    r1 = suites(counterexample("missing-subtraction"))
    r2 = suites(counterexample("missing-subtraction"))
    assert [r.to_json() for r in r1] == [r.to_json() for r in r2]


def test_check_report_merge_prefixes():
    a, b = CheckReport("a"), CheckReport("b")
    b.expect(False, "X", "broken")
    a.merge(b, prefix="sub-")
    assert a.axioms_violated() == ["sub-X"]
    assert not a.ok


def test_pullback_and_pushout_are_universal_on_finsets():
    inst = finset_instance(3)
    objs = inst.window(None)
    for Y in objs:
        cofs = inst.subobjects(Y)
        for c1, c2 in itertools.product(cofs, repeat=2):
            P, p1, p2 = inst.pullback(c1, c2)
            assert inst.is_cartesian(p1, p2, c1, c2)
            # the chosen pullback is the intersection
            assert inst.compose(c1, p1).image() == c1.image() & c2.image()
            assert inst.size(P) == len(c1.image() & c2.image())


def test_pushout_along_cofibrations_counts_points():
    inst = finset_instance(3)
    for X in inst.window(None):
        subs = inst.subobjects(X)
        for c in subs:
            Z = inst.source(c)
            for Y in inst.window(None):
                for d in inst.subobjects(Y):
                    if inst.source(d) != Z:
                        continue
                    P, j1, j2 = inst.pushout(c, d)
                    assert inst.size(P) == inst.size(X) + inst.size(Y) - inst.size(Z)
                    assert inst.is_cocartesian(c, d, j1, j2)


def test_tabulated_twin_agrees_with_concrete():
    inst = finset_instance(2)
    tab = TabulatedInstance.from_instance(inst, None)
    for f in (check_subtraction_axioms, check_sw_axioms):
        assert f(tab, None).ok == f(inst, None).ok
    doc = tab.to_json()
    again = TabulatedInstance.from_json(doc)
    assert again.to_json() == doc


def test_gset_window_and_orbits():
    inst = gset_instance(cyclic_group(2), 2)
    labels = {inst.iso_label(X) for X in inst.window(None)}
    # empty, one fixed point, two fixed points, one free orbit
    assert len(labels) == 4


def test_f1_plus_window_matches_pair_count():
    # each point of the universe is outside C, in A, or in B
    base = finset_instance(2)
    F = build_f1_plus(base, None)
    assert len(F.window(None)) == sum(2 ** len(X) for X in base.window(None)) == 3**2


@settings(max_examples=50, deadline=None)
@given(st.sets(st.sampled_from("abc")), st.sets(st.sampled_from("abc")))
def test_morphism_composition_associates(s, t):
    X, Y = frozenset(s), frozenset(s | t)
    f = Morphism.from_mapping(X, Y, {x: x for x in X})
    g = Morphism.from_mapping(Y, Y, {y: y for y in Y})
    inst = finset_instance(3)
    assert inst.compose(g, f) == f
    assert inst.compose(inst.compose(g, g), f) == inst.compose(g, inst.compose(g, f))


def test_unknown_counterexample_rejected():
    with pytest.raises(PreconditionError):
        counterexample("nope")
