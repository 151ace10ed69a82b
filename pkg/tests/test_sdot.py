import pytest

from swkit.core import PreconditionError
from swkit.instances import cyclic_group, finset_instance, gset_instance
from swkit.sdot import (
    Flag,
    arrow_indices,
    check_simplicial_identities,
    count_chains,
    degeneracy,
    empty_flag,
    enumerate_flags,
    external_product,
    face,
    flag_from_row,
    flags_isomorphic,
    reindex,
    validate_biflag,
    validate_flag,
)


def test_flag_counts_match_closed_form():
    # each of the u points enters the chain at one of n steps or never
    inst = finset_instance(3)
    for n in range(5):
        assert len(enumerate_flags(inst, n, None)) == (n + 1) ** 3
        assert count_chains(inst, n, None) == (n + 1) ** 3


def test_every_enumerated_flag_validates():
    inst = gset_instance(cyclic_group(2), 3)
    for n in range(3):
        for F in enumerate_flags(inst, n, None):
            rep = validate_flag(inst, F)
            assert rep.ok, rep.to_json()


def test_identities_small_gset():
    inst = gset_instance(cyclic_group(2), 2)
    flags = [F for n in range(4) for F in enumerate_flags(inst, n, None)]
    assert check_simplicial_identities(inst, flags).ok


def test_face_deletes_row_and_column():
    inst = finset_instance(3)
    a, b, c = (frozenset(s) for s in ("a", "ab", "abc"))
    row = [inst.inclusion(frozenset(), a), inst.inclusion(a, b), inst.inclusion(b, c)]
    F = flag_from_row(inst, row)
    assert F.top_row() == (frozenset(), a, b, c)
    assert face(inst, 0, F).top_row() == (frozenset(), frozenset("b"), frozenset("bc"))
    assert face(inst, 3, F).top_row() == (frozenset(), a, b)
    assert degeneracy(inst, 1, F).top_row() == (frozenset(), a, a, b, c)


def test_broken_flag_is_reported():
    inst = finset_instance(2)
    F = flag_from_row(inst, [inst.inclusion(frozenset(), frozenset("a")), inst.inclusion(frozenset("a"), frozenset("ab"))])
    X = dict(F.objects)
    X[(1, 2)] = frozenset("a")  # should be {b}
    bad = Flag.build(F.n, X, dict(F.horiz), dict(F.vert))
    assert not validate_flag(inst, bad).ok


def test_reindex_rejects_non_monotone():
    inst = finset_instance(2)
    F = empty_flag(inst, 2)
    with pytest.raises(PreconditionError):
        reindex(inst, F, [1, 0], 1)
    with pytest.raises(PreconditionError):
        face(inst, 0, empty_flag(inst, 0))


def test_arrow_indices():
    assert arrow_indices(1) == [(0, 0), (0, 1), (1, 1)]


def test_external_product_is_a_biflag():
    inst = finset_instance(2)
    F = enumerate_flags(inst, 1, None)[-1]
    G = enumerate_flags(inst, 1, None)[1]
    assert validate_biflag(inst, external_product(inst, F, G)).ok


def test_isomorphic_flags_by_relabelling():
    inst = finset_instance(2)
    a, b, ab = frozenset("a"), frozenset("b"), frozenset("ab")
    F = flag_from_row(inst, [inst.inclusion(frozenset(), a), inst.inclusion(a, ab)])
    G = flag_from_row(inst, [inst.inclusion(frozenset(), b), inst.inclusion(b, ab)])
    H = flag_from_row(inst, [inst.inclusion(frozenset(), ab), inst.inclusion(ab, ab)])
    assert flags_isomorphic(inst, F, G)
    assert not flags_isomorphic(inst, F, H)
