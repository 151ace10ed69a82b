import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from swkit.core import BudgetExceeded, PreconditionError
from swkit.varieties import (
    Poly,
    PolySystem,
    canonical_set,
    check_budget,
    closed_subset,
    constructible,
    enumerate_points,
    enumerate_points_numpy,
    from_point_map,
    indicator,
    product,
    subtraction_sequence_of,
    varieties_instance,
)


def brute(prime, nvars, eqs, neqs):
    pts = []
    for x in itertools.product(range(prime), repeat=nvars):
        if all(f(x) == 0 for f in eqs) and all(g(x) != 0 for g in neqs):
            pts.append(x)
    return pts


def random_poly(rng, p, n, terms=3, deg=3):
    d = {}
    for _ in range(rng.randint(1, terms)):
        e = tuple(rng.randint(0, deg) for _ in range(n))
        d[e] = d.get(e, 0) + rng.randint(1, p - 1)
    return Poly.from_dict(p, n, d)


def test_conic_has_four_points_over_f3():
    x, y = Poly.var(3, 2, 0), Poly.var(3, 2, 1)
    C = constructible(3, 2, [x**2 + y**2 - 1])
    # hand count: x^2 + y^2 = 1 over F_3 -> (0,1), (0,2), (1,0), (2,0)
    assert C.points == ((0, 1), (0, 2), (1, 0), (2, 0))


def test_non_prime_field_rejected():
    with pytest.raises(PreconditionError, match="4 is not prime"):
        PolySystem(4, 1)


def test_budget_exceeded_is_distinct():
    with pytest.raises(BudgetExceeded):
        check_budget(5, 3, budget=100)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_enumeration_routes_agree(p):
    rng = random.Random(p)
    for _ in range(20):
        n = rng.randint(1, 2)
        eqs = [random_poly(rng, p, n) for _ in range(rng.randint(0, 2))]
        neqs = [random_poly(rng, p, n) for _ in range(rng.randint(0, 1))]
        s = PolySystem(p, n, tuple(eqs), tuple(neqs))
        assert enumerate_points(s) == enumerate_points_numpy(s) == tuple(brute(p, n, eqs, neqs))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_poly_arithmetic_is_pointwise(data):
    p = data.draw(st.sampled_from([2, 3, 5]))
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    f, g = random_poly(rng, p, 2), random_poly(rng, p, 2)
    for x in itertools.product(range(p), repeat=2):
        assert (f + g)(x) == (f(x) + g(x)) % p
        assert (f * g)(x) == f(x) * g(x) % p
        assert (f - g)(x) == (f(x) - g(x)) % p
        assert f.reduced()(x) == f(x)


def test_indicator_is_exact():
    pts = [(0, 1), (2, 2)]
    ind = indicator(3, 2, pts)
    for x in itertools.product(range(3), repeat=2):
        assert ind(x) == (1 if x in pts else 0)


def test_canonical_set_round_trip():
    pts = frozenset({(1,), (2,)})
    X = canonical_set(3, 1, pts)
    assert X.point_set == pts
    assert canonical_set(3, 1, pts) is X


def test_interpolated_maps_hit_the_table():
    X = canonical_set(3, 1, frozenset({(0,), (1,), (2,)}))
    Y = canonical_set(3, 2, frozenset({(0, 0), (1, 2), (2, 1)}))
    m = {(0,): (0, 0), (1,): (1, 2), (2,): (2, 1)}
    f = from_point_map(X, Y, m, "closed-immersion")
    assert f.point_map == m


def test_closed_and_open_parts_partition():
    x, y = Poly.var(5, 2, 0), Poly.var(5, 2, 1)
    Y = constructible(5, 2, [x * y])
    Z, c = closed_subset(Y, [x])
    c, o = subtraction_sequence_of(c)
    assert len(Y) == len(Z) + len(o.source)
    assert o.source.point_set | Z.point_set == Y.point_set


def test_product_counts_multiply():
    x = Poly.var(3, 1, 0)
    X = constructible(3, 1, [x**2 - 1])
    Y = constructible(3, 1, (), [x])
    P = product(X, Y)
    assert len(P) == len(X) * len(Y)


def test_window_sizes():
    V = varieties_instance(2, 2)
    assert len(V.window(None)) == 16
    assert len(V.window(2)) == 1 + 4 + 6
