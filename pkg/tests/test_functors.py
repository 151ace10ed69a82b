import pytest

from swkit.functors import (
    check_flag_naturality,
    check_op_w_exact,
    check_splitting,
    check_w_exact,
    drop_open_points_functor,
    induced_flag_map,
    induced_k0_map,
    k0_map_is_homomorphism,
    point_count_functor,
    unit_functor,
    validate_pointed_flag,
)
from swkit.instances import PointedSets, cyclic_group, finset_instance, gset_instance
from swkit.k0 import k0_group
from swkit.sdot import enumerate_flags
from swkit.varieties import varieties_instance


@pytest.mark.parametrize("p,n", [(2, 1), (3, 1), (2, 2)])
def test_point_count_is_w_exact(p, n):
    rep = check_w_exact(point_count_functor(varieties_instance(p, n)), None)
    assert rep.ok, rep.axioms_violated()
    assert rep.checked.get("base change", 0) > 0 and rep.checked.get("excision", 0) > 0


def test_point_count_on_finsets_is_w_exact():
    assert check_w_exact(point_count_functor(finset_instance(3)), None).ok


def test_dropping_open_points_breaks_exactness():
    rep = check_w_exact(drop_open_points_functor(varieties_instance(2, 1)), None)
    assert set(rep.axioms_violated()) >= {"base change", "excision"}


def test_induced_k0_map_is_counting():
    V = varieties_instance(2, 2)
    F = point_count_functor(V)
    G = k0_group(V, None)
    assert k0_map_is_homomorphism(F, G)
    m = induced_k0_map(F, G)
    assert all(m[g] == g for g in G.generators)


def test_unit_functor_small():
    G = unit_functor(gset_instance(cyclic_group(2), 4), max_size=4)
    assert check_op_w_exact(G, max_size=4).ok


def test_splitting_strict_and_relabelled():
    assert check_splitting(max_size=4).strict
    v = check_splitting(max_size=4, labeling="reversed")
    assert not v.strict and v.up_to_iso
    assert v.first_failure is not None


def test_flags_map_to_pointed_flags():
    V = varieties_instance(2, 1)
    F = point_count_functor(V)
    flags = [fl for n in range(3) for fl in enumerate_flags(V, n, None)]
    for fl in flags:
        assert validate_pointed_flag(induced_flag_map(F, fl)).ok
    assert check_flag_naturality(F, flags).ok


def test_pointed_sets_cofiber():
    cat = PointedSets(4)
    f = cat.make(2, 4, (0, 1, 3))
    q = cat.cofiber(f)
    assert q.target == 2
    assert cat.is_pushout_along_basepoint(f, q)
