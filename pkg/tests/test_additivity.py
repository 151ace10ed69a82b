import random

import pytest

from swkit import additivity as add
from swkit.core import PreconditionError, build_f1_plus
from swkit.instances import finset_instance
from swkit.sdot import empty_flag, reindex

fs = frozenset


@pytest.fixture(scope="module")
def fin2():
    return finset_instance(2)


@pytest.fixture(scope="module")
def small_corpus(fin2):
    return add.exhaustive_corpus(fin2, 2, 1)


def chain(inst, sets):
    """Inclusions between consecutive sets."""
    return [inst.inclusion(fs(a), fs(b)) for a, b in zip(sets, sets[1:])]


def element(inst, C_row, A_row, S_row, T_row):
    """Element from top rows: middle chain, its left part, and the two tails."""
    F1 = build_f1_plus(inst, None)
    seqs = [F1.seq(inst.sub(fs(c), fs(a))[1]) for c, a in zip(C_row, A_row)]
    row = [F1.lift(seqs[k], inst.inclusion(fs(C_row[k]), fs(C_row[k + 1])), seqs[k + 1]) for k in range(len(seqs) - 1)]
    from swkit.sdot import flag_from_row

    F = flag_from_row(F1, row) if row else empty_flag(F1, 0)
    top = seqs[-1]
    return add.element_from_sequence_flag(inst, F, chain(inst, [top.Z, *S_row]), chain(inst, [top.Y, *T_row]))


def test_rho_subtracts_first_tail_object():
    inst = finset_instance(3)
    e = element(inst, [""], [""], ["a", "ab", "abc"], ["", "", ""])
    A, B = add.rho_element(inst, e)
    assert A.top_row() == (fs(), fs("b"), fs("bc"))
    assert B.top_row() == (fs(), fs(), fs())


def test_rho_of_degree_zero_tail_is_empty(fin2):
    e = element(fin2, [""], [""], ["a"], ["b"])
    A, B = add.rho_element(fin2, e)
    assert A == empty_flag(fin2, 0) == B


def test_rho_two_routes(small_corpus, fin2):
    # chosen subtraction of the tail versus reading the tail rows of the flag
    for e in small_corpus:
        A, B = add.rho_element(fin2, e)
        tail = list(range(e.m + 1, e.m + 2 + e.n))
        assert A == reindex(fin2, e.P, tail, e.n)
        assert B == reindex(fin2, e.Q, tail, e.n)


def test_rho_I_and_I_rho(small_corpus, fin2):
    for e in small_corpus:
        r = add.rho_element(fin2, e)
        assert add.rho_element(fin2, add.I_element(fin2, r, e.m)) == r
        assert add.I_element(fin2, r, e.m) == add.E_element(fin2, e)


def test_mix_view_agrees(small_corpus, fin2):
    F1 = build_f1_plus(fin2, None)
    for e in small_corpus[::7]:
        mix = add.as_mix(e)
        assert add.check_mix(F1, (fin2, fin2), add.sequence_image(fin2), mix).ok
        assert add.rho((fin2, fin2), mix) == add.rho_element(fin2, e)
        E = add.E_mix(F1, (fin2, fin2), mix)
        assert E.right == (add.E_element(fin2, e).P, add.E_element(fin2, e).Q)


def test_E_on_degree_zero_lives_on_tails(fin2):
    e = element(fin2, ["ab"], ["a"], ["a", "ab"], ["b", "ab"])
    E = add.E_element(fin2, e)
    assert E.P.top_row() == (fs(), fs(), fs("b"))
    assert E.Q.top_row() == (fs(), fs(), fs("a"))
    assert E.C == empty_flag(fin2, 0)


def test_gamma_slots(small_corpus, fin2):
    for e in small_corpus:
        g = add.Gamma(fin2, e)
        m = e.m
        assert all(g.P.X[(0, l)] == fs() for l in range(m + 1))
        assert [g.P.X[(0, m + 1 + j)] for j in range(e.n + 1)] == [e.S(j) - e.S(0) for j in range(e.n + 1)]
        assert g.C == reindex(fin2, e.Q, list(range(m + 1)), m)
        assert g.Q == e.Q
        assert add.Gamma(fin2, g) == g
        if all(e.A(0, l) == fs() for l in range(m + 1)) and e.S(0) == fs():
            assert g == e


def test_h_outputs_validate_and_certify(small_corpus, fin2):
    for e in small_corpus[::5]:
        for i in range(e.m + 1):
            he = add.homotopy_h(fin2, i, e)
            assert add.validate_element(fin2, he, cross_check=True).ok
            for total, ok in add.subtraction_cases(fin2, i, he.C).values():
                assert total == ok


def test_h_slots_by_set_arithmetic():
    # a 5-simplex over three points, checked slot by slot against set formulas
    inst = finset_instance(3)
    rng = random.Random(11)
    for _ in range(10):
        e = add.random_element(inst, rng, 5, 1)
        he = add.homotopy_h(inst, 3, e)
        s = lambda x: x if x <= 3 else x - 1  # noqa: E731
        for k in range(7):
            for l in range(k, 7):
                if l <= 3:
                    want_a = e.A(0, l) - e.A(0, k)
                elif k <= 3:
                    want_a = e.S(0) - e.A(0, k)
                else:
                    want_a = fs()
                assert he.P.X[(k, l)] == want_a
                assert he.Q.X[(k, l)] == e.B(s(k), s(l))
                c = he.C.X[(k, l)]
                if l <= 3:
                    assert c == e.C.X[(k, l)]
                elif k <= 3:
                    Ckl, Akl = e.C.X[(k, l - 1)], e.A(k, l - 1)
                    assert len(c) == len(Ckl) + len(e.S(0) - e.A(0, k)) - len(Akl)
                else:
                    assert c == e.B(k - 1, l - 1)


def test_designated_map_is_the_composite(fin2, small_corpus):
    for e in small_corpus[::9]:
        for i in range(e.m + 1):
            he = add.homotopy_h(fin2, i, e)
            for k in range(i + 1):
                for l in range(i + 1, e.m + 2):
                    P, j1, j2 = fin2.pushout(e.al[(k, l - 1)], add.h_map(fin2, e.P, k, l - 1, e.m + 1))
                    assert he.be[(k, l)] == fin2.compose(j1, e.be[(k, l - 1)])
                    assert fin2.is_subtraction(he.al[(k, l)], he.be[(k, l)])


def test_hand_checked_face_identity(fin2):
    # A: 0 < 0 < {a};  C: 0 < {b} < {a,b};  B: 0 < {b} < {b};  S_0 = {a}, T_0 = {b}
    e = element(fin2, ["", "b", "ab"], ["", "", "a"], ["a"], ["b"])
    h1 = add.homotopy_h(fin2, 1, e)
    assert h1.C.top_row() == (fs(), fs("b"), fs("ab"), fs("ab"))
    lhs = add.element_face(fin2, h1, 3)
    rhs = add.homotopy_h(fin2, 1, add.element_face(fin2, e, 2))
    assert lhs.C.top_row() == rhs.C.top_row() == (fs(), fs("b"), fs("ab"))
    assert lhs == rhs
    # the boundary case i = j + 1 is not an identity
    d2h1 = add.element_face(fin2, h1, 2)
    h1d1 = add.homotopy_h(fin2, 1, add.element_face(fin2, e, 1))
    assert d2h1.C.top_row() == (fs(), fs("b"), fs("ab"))
    assert h1d1.C.top_row() == (fs(), fs("ab"), fs("ab"))
    assert d2h1 != h1d1


def test_degenerate_element_passes(fin2):
    e = element(fin2, [""], [""], [""], [""])
    assert add.verify_homotopy(fin2, [e]).ok


def test_small_exhaustive_identities(fin2, small_corpus):
    rep = add.verify_homotopy(fin2, small_corpus, validate=False)
    assert rep.ok
    assert add.identities_checked(rep) > 1000


def test_wrong_homotopy_is_caught(fin2, small_corpus, monkeypatch):
    monkeypatch.setattr(add, "sigma_B", lambda i, m, n: [min(l, m + 1 + n) if l <= i + 1 else l - 1 for l in range(m + 3 + n)])
    corpus = [e for e in small_corpus if e.m == 1][:40]
    rep = add.verify_homotopy(fin2, corpus, validate=False)
    assert not rep.ok
    v = rep.violations[0]
    assert "lhs" in v.witness and "rhs" in v.witness


def test_h_index_out_of_range(fin2, small_corpus):
    with pytest.raises(PreconditionError):
        add.homotopy_h(fin2, 5, small_corpus[0])


def test_golden_rendering():
    assert add.golden_appendix_text() == add.stored_appendix_text()
    doc = add.render_slots(3, 5)
    assert doc["flags"]["C"][3][1] == "S_{3,0}"
    assert doc["flags"]["B"][0][3:5] == ["B_3", "B_3"]


def test_random_corpus_is_seeded():
    inst = finset_instance(3)
    a = add.random_corpus(inst, 5, 42)
    b = add.random_corpus(inst, 5, 42)
    assert a == b
