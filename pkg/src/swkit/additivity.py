"""Elements of the mixing construction for subtraction sequences and the explicit homotopy.

An :class:`AdditivityElement` of bidegree ``(m, n)`` over a concrete
instance consists of

* ``P``: a flag of degree ``m + 1 + n`` whose top row is
  ``A_0 -> ... -> A_m -> S_0 -> ... -> S_n`` (``A_0`` initial),
* ``Q``: likewise ``B_0 -> ... -> B_m -> T_0 -> ... -> T_n``,
* ``C``: a flag of degree ``m``,
* ``alpha[k, l]: A_{k,l} -> C_{k,l}`` and ``beta[k, l]: B_{k,l} -> C_{k,l}``,
  a subtraction sequence in every slot, natural and cartesian along the
  flag arrows.

The first ``m + 1`` indices of ``P`` and ``Q`` are the outer flags of a
flag of subtraction sequences; the remaining ``n + 1`` indices are the tails.
Face and degeneracy maps act on the first ``m + 1`` indices.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from typing import Sequence

from .core import (
    CheckReport,
    ConcreteInstance,
    PreconditionError,
    PushoutTableIncomplete,
    SeqMap,
    SeqObj,
    StructuralError,
    SWInstance,
    build_f1_plus,
    to_jsonable,
)
from .sdot import (
    Flag,
    arrow_indices,
    degeneracy,
    empty_flag,
    enumerate_flags,
    face,
    flag_from_row,
    h_map,
    reindex,
    v_map,
    validate_flag,
)

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# generic mixing elements


@dataclass(frozen=True)
class MixElement:
    """A degree-``m`` flag of the source and flags of degree ``m + 1 + n`` in each target component.

    ``image(left)`` must equal the restriction of each right flag to its
    first ``m + 1`` indices.
    """

    m: int
    n: int
    left: Flag
    right: tuple

    def restrict(self, c: int, inst: SWInstance) -> Flag:
        return reindex(inst, self.right[c], list(range(self.m + 1)), self.m)


def check_mix(source: SWInstance, targets: Sequence[SWInstance], image, mix: MixElement) -> CheckReport:
    """``image(flag) -> tuple of target flags``; compares arrow by arrow."""
    rep = CheckReport(f"mixing element of bidegree ({mix.m}, {mix.n})")
    rep.merge(validate_flag(source, mix.left), prefix="left-")
    imgs = image(mix.left)
    for c, (inst, R) in enumerate(zip(targets, mix.right)):
        if R.n != mix.m + 1 + mix.n:
            rep.fail("shape", "right flag has the wrong degree", c)
            continue
        rep.merge(validate_flag(inst, R), prefix=f"right{c}-")
        rep.expect(mix.restrict(c, inst) == imgs[c], "compatibility", "image of the left flag is not the right prefix", c)
    return rep.finalize()


def rho_flag(inst: SWInstance, R: Flag, m: int) -> Flag:
    """Tail of ``R`` after index ``m``, with its first entry subtracted by the chosen subtraction."""
    n = R.n - m - 1
    if n < 0:
        raise PreconditionError("flag is shorter than its left degree")
    base = m + 1
    legs = []
    for j in range(n + 1):
        c = h_map(inst, R, 0, base, base + j)
        leg = inst.subtraction(c)
        if leg is None:
            raise PreconditionError("tail inclusion has no chosen subtraction")
        legs.append(leg)
    if n == 0:
        return empty_flag(inst, 0)
    row = []
    for j in range(n):
        via = inst.compose(R.H[(0, base + j)], legs[j])
        u = inst.factor(via, legs[j + 1])
        if u is None:
            raise StructuralError("tail arrow does not restrict to the subtracted tail")
        row.append(u)
    if inst.source(legs[0]) != inst.initial:
        raise StructuralError("subtracting the first tail object from itself is not initial")
    return flag_from_row(inst, row)


def rho(targets: Sequence[SWInstance], mix: MixElement) -> tuple:
    return tuple(rho_flag(inst, R, mix.m) for inst, R in zip(targets, mix.right))


def _gamma(m: int, n: int) -> list:
    # indices 0..m+1 collapse onto the first tail entry
    return [m + 1] * (m + 2) + list(range(m + 2, m + 2 + n))


def _iota(m: int, n: int) -> list:
    return [0] * (m + 1) + list(range(n + 1))


def E_mix(source: SWInstance, targets: Sequence[SWInstance], mix: MixElement) -> MixElement:
    right = tuple(reindex(inst, R, _gamma(mix.m, mix.n), R.n) for inst, R in zip(targets, mix.right))
    return MixElement(mix.m, mix.n, empty_flag(source, mix.m), right)


def I_mix(source: SWInstance, targets: Sequence[SWInstance], flags: Sequence[Flag], m: int) -> MixElement:
    n = flags[0].n
    right = tuple(reindex(inst, F, _iota(m, n), m + 1 + n) for inst, F in zip(targets, flags))
    return MixElement(m, n, empty_flag(source, m), right)


# ---------------------------------------------------------------------------
# elements over subtraction sequences


def _items(d: dict) -> tuple:
    return tuple(sorted(d.items()))


@dataclass(frozen=True)
class AdditivityElement:
    m: int
    n: int
    P: Flag
    Q: Flag
    C: Flag
    alpha: tuple
    beta: tuple

    @classmethod
    def build(cls, m, n, P, Q, C, alpha: dict, beta: dict) -> "AdditivityElement":
        return cls(m, n, P, Q, C, _items(alpha), _items(beta))

    @cached_property
    def al(self) -> dict:
        return dict(self.alpha)

    @cached_property
    def be(self) -> dict:
        return dict(self.beta)

    def A(self, k, l):
        return self.P.X[(k, l)]

    def B(self, k, l):
        return self.Q.X[(k, l)]

    def S(self, j):
        return self.P.X[(0, self.m + 1 + j)]

    def T(self, j):
        return self.Q.X[(0, self.m + 1 + j)]

    def to_json(self):
        return {
            "bidegree": [self.m, self.n],
            "P": self.P.to_json(),
            "Q": self.Q.to_json(),
            "C": self.C.to_json(),
            "alpha": [[k, l, to_jsonable(f)] for (k, l), f in self.alpha],
            "beta": [[k, l, to_jsonable(f)] for (k, l), f in self.beta],
        }


def validate_element(inst: SWInstance, e: AdditivityElement, cross_check: bool = False) -> CheckReport:
    """Flag conditions on ``P``, ``Q``, ``C`` plus exact, natural, cartesian columns.

    ``cross_check`` also assembles the flag of subtraction sequences and runs
    the generic flag validator over the sequence instance.
    """
    rep = CheckReport(f"element of bidegree ({e.m}, {e.n})")
    M = e.m + 1 + e.n
    if e.P.n != M or e.Q.n != M or e.C.n != e.m:
        raise StructuralError("element flags have inconsistent degrees")
    rep.merge(validate_flag(inst, e.P), prefix="A-")
    rep.merge(validate_flag(inst, e.Q), prefix="B-")
    rep.merge(validate_flag(inst, e.C), prefix="C-")
    if not rep.ok:
        return rep.finalize()
    al, be = e.al, e.be
    for a in arrow_indices(e.m):
        f, g = al.get(a), be.get(a)
        if f is None or g is None:
            rep.fail("columns", "missing column map", a)
            continue
        ok = inst.source(f) == e.P.X[a] and inst.target(f) == e.C.X[a] and inst.source(g) == e.Q.X[a] and inst.target(g) == e.C.X[a]
        if rep.expect(ok, "columns", "column map has the wrong ends", a):
            rep.expect(inst.is_subtraction(f, g), "columns", "column is not a subtraction sequence", a)
    if not rep.ok:
        return rep.finalize()
    for (k, l) in [(k, l) for k in range(e.m + 1) for l in range(k, e.m)]:
        for side, F, col in (("A", e.P, al), ("B", e.Q, be)):
            top, bot = F.H[(k, l)], e.C.H[(k, l)]
            s, t = col[(k, l)], col[(k, l + 1)]
            if rep.expect(inst.compose(t, top) == inst.compose(bot, s), "natural", f"{side} column does not commute with rows", (k, l)):
                rep.expect(inst.is_cartesian(top, s, t, bot), "cartesian", f"{side} row square is not cartesian", (k, l))
    for (k, l) in [(k, l) for l in range(e.m + 1) for k in range(l)]:
        for side, F, col in (("A", e.P, al), ("B", e.Q, be)):
            top, bot = F.V[(k, l)], e.C.V[(k, l)]
            s, t = col[(k + 1, l)], col[(k, l)]
            if rep.expect(inst.compose(t, top) == inst.compose(bot, s), "natural", f"{side} column does not commute with legs", (k, l)):
                rep.expect(inst.is_cartesian(top, s, t, bot), "cartesian", f"{side} leg square is not cartesian", (k, l))
    if cross_check and rep.ok and isinstance(inst, ConcreteInstance):
        F1 = build_f1_plus(inst, None)
        rep.merge(validate_flag(F1, to_sequence_flag(e)), prefix="seq-")
    return rep.finalize()


def to_sequence_flag(e: AdditivityElement) -> Flag:
    """The left part as a flag of subtraction sequences."""
    al, be = e.al, e.be
    objs = {a: SeqObj(al[a], be[a]) for a in arrow_indices(e.m)}
    horiz = {
        (k, l): SeqMap(objs[(k, l)], objs[(k, l + 1)], e.P.H[(k, l)], e.C.H[(k, l)], e.Q.H[(k, l)])
        for k in range(e.m + 1)
        for l in range(k, e.m)
    }
    vert = {
        (k, l): SeqMap(objs[(k + 1, l)], objs[(k, l)], e.P.V[(k, l)], e.C.V[(k, l)], e.Q.V[(k, l)])
        for l in range(e.m + 1)
        for k in range(l)
    }
    return Flag.build(e.m, objs, horiz, vert)


def as_mix(e: AdditivityElement) -> MixElement:
    return MixElement(e.m, e.n, to_sequence_flag(e), (e.P, e.Q))


def sequence_image(inst: SWInstance):
    """The functor (outer left, outer right) on flags of subtraction sequences."""

    def image(F: Flag) -> tuple:
        A = Flag.build(F.n, {a: o.Z for a, o in F.objects}, {k: f.z for k, f in F.horiz}, {k: f.z for k, f in F.vert})
        B = Flag.build(F.n, {a: o.Y for a, o in F.objects}, {k: f.y for k, f in F.horiz}, {k: f.y for k, f in F.vert})
        return A, B

    return image


# ---------------------------------------------------------------------------
# simplicial structure in the first direction


def _reindex_cols(col: dict, sig: Sequence[int], m: int) -> dict:
    return {(a, b): col[(sig[a], sig[b])] for a, b in arrow_indices(m)}


def element_face(inst: SWInstance, e: AdditivityElement, k: int) -> AdditivityElement:
    if e.m == 0 or not 0 <= k <= e.m:
        raise PreconditionError(f"face {k} undefined in left degree {e.m}")
    sig = [a if a < k else a + 1 for a in range(e.m)]
    return AdditivityElement.build(
        e.m - 1,
        e.n,
        face(inst, k, e.P),
        face(inst, k, e.Q),
        face(inst, k, e.C),
        _reindex_cols(e.al, sig, e.m - 1),
        _reindex_cols(e.be, sig, e.m - 1),
    )


def element_degeneracy(inst: SWInstance, e: AdditivityElement, k: int) -> AdditivityElement:
    if not 0 <= k <= e.m:
        raise PreconditionError(f"degeneracy {k} undefined in left degree {e.m}")
    sig = [a if a <= k else a - 1 for a in range(e.m + 2)]
    return AdditivityElement.build(
        e.m + 1,
        e.n,
        degeneracy(inst, k, e.P),
        degeneracy(inst, k, e.Q),
        degeneracy(inst, k, e.C),
        _reindex_cols(e.al, sig, e.m + 1),
        _reindex_cols(e.be, sig, e.m + 1),
    )


# ---------------------------------------------------------------------------
# rho, E_n, I_n, Gamma


def _empty_cols(inst: SWInstance, m: int) -> dict:
    ide = inst.identity(inst.initial)
    return {a: ide for a in arrow_indices(m)}


def rho_element(inst: SWInstance, e: AdditivityElement) -> tuple:
    return rho_flag(inst, e.P, e.m), rho_flag(inst, e.Q, e.m)


def E_element(inst: SWInstance, e: AdditivityElement) -> AdditivityElement:
    g = _gamma(e.m, e.n)
    M = e.P.n
    cols = _empty_cols(inst, e.m)
    return AdditivityElement.build(
        e.m, e.n, reindex(inst, e.P, g, M), reindex(inst, e.Q, g, M), empty_flag(inst, e.m), cols, dict(cols)
    )


def I_element(inst: SWInstance, flags: tuple, m: int) -> AdditivityElement:
    FA, FB = flags
    if FA.n != FB.n:
        raise PreconditionError("both tails need the same degree")
    n = FA.n
    io = _iota(m, n)
    cols = _empty_cols(inst, m)
    return AdditivityElement.build(
        m, n, reindex(inst, FA, io, m + 1 + n), reindex(inst, FB, io, m + 1 + n), empty_flag(inst, m), cols, dict(cols)
    )


def Gamma(inst: SWInstance, e: AdditivityElement) -> AdditivityElement:
    """Empty outer-left part, middle replaced by the outer right one, left tail subtracted."""
    g = _gamma(e.m, e.n)
    Bflag = reindex(inst, e.Q, list(range(e.m + 1)), e.m)
    alpha = {a: inst.initial_map(Bflag.X[a]) for a in arrow_indices(e.m)}
    beta = {a: inst.identity(Bflag.X[a]) for a in arrow_indices(e.m)}
    return AdditivityElement.build(e.m, e.n, reindex(inst, e.P, g, e.P.n), e.Q, Bflag, alpha, beta)


# ---------------------------------------------------------------------------
# the homotopy


def sigma_A(i: int, m: int, n: int) -> list:
    """Index map for the outer-left flag of ``h_i``: columns ``i+1..m+1`` all read ``S_0``."""
    return [l if l <= i else m + 1 for l in range(m + 2)] + [m + 1 + j for j in range(n + 1)]


def sigma_B(i: int, m: int, n: int) -> list:
    """Index map for the outer-right flag of ``h_i``: column ``i`` repeated."""
    return [l if l <= i else l - 1 for l in range(m + 3 + n)]


def slot_recipe(part: str, i: int, k: int, l: int) -> tuple:
    """Which piece of ``e`` fills slot ``(k, l)`` of the ``part`` flag of ``h_i(e)``.

    ``("A", k, l)``, ``("B", k, l)``, ``("C", k, l)`` name entries of ``e``;
    ``("S-A", k)`` is the subtraction of ``A_k`` from ``S_0``;
    ``("po", k, j)`` is ``C_{k,j}`` glued to ``S_0 - A_k`` along ``A_{k,j}``;
    ``("empty",)`` is the initial object.
    """
    if part == "A":
        if l <= i:
            return ("A", k, l)
        if k <= i:
            return ("S-A", k)
        return ("empty",)
    if part == "B":
        s = lambda x: x if x <= i else x - 1  # noqa: E731
        return ("B", s(k), s(l))
    if part == "C":
        if l <= i:
            return ("C", k, l)
        if k <= i:
            return ("po", k, l - 1)
        if k == l == i + 1:
            return ("empty",)
        return ("B", k - 1, l - 1)
    raise ValueError(f"unknown part {part!r}")


def homotopy_slots(i: int, m: int) -> dict:
    """Recipes for the left part (degree ``m + 1``) of every flag of ``h_i(e)``."""
    if not 0 <= i <= m:
        raise PreconditionError(f"h_{i} is defined for 0 <= i <= {m}")
    return {
        part: [[slot_recipe(part, i, k, l) for l in range(k, m + 2)] for k in range(m + 2)] for part in ("A", "B", "C")
    }


class _Pushouts:
    """Chosen pushouts ``C_{k,j} u_{A_{k,j}} (S_0 - A_k)``, memoized per slot."""

    def __init__(self, inst: SWInstance, e: AdditivityElement):
        self.inst, self.e = inst, e
        self.memo: dict = {}

    def __call__(self, k: int, j: int):
        if (k, j) not in self.memo:
            inst, e = self.inst, self.e
            span = (e.al[(k, j)], h_map(inst, e.P, k, j, e.m + 1))
            po = inst.pushout(*span)
            if po is None:
                raise PushoutTableIncomplete(span)
            self.memo[(k, j)] = po
        return self.memo[(k, j)]


def _copair(inst, po, a, b):
    u = inst.copair(po, a, b)
    if u is None:
        raise StructuralError("induced map out of a chosen pushout does not exist")
    return u


def homotopy_h(inst: SWInstance, i: int, e: AdditivityElement) -> AdditivityElement:
    """``h_i(e)``, of bidegree ``(m + 1, n)``."""
    m, n = e.m, e.n
    if not 0 <= i <= m:
        raise PreconditionError(f"h_{i} is defined for 0 <= i <= {m}")
    po = _Pushouts(inst, e)
    al, be, C, P, Q = e.al, e.be, e.C, e.P, e.Q
    top = m + 1

    def obj(k, l):
        r = slot_recipe("C", i, k, l)
        if r[0] == "C":
            return C.X[(k, l)]
        if r[0] == "po":
            return po(r[1], r[2])[0]
        if r[0] == "B":
            return Q.X[(r[1], r[2])]
        return inst.initial

    X = {a: obj(*a) for a in arrow_indices(m + 1)}
    H, V = {}, {}
    for k in range(m + 2):
        for l in range(k, m + 1):
            if l + 1 <= i:
                H[(k, l)] = C.H[(k, l)]
            elif k <= i and l == i:
                H[(k, l)] = po(k, i)[1]
            elif k <= i:
                src, dst = po(k, l - 1), po(k, l)
                H[(k, l)] = _copair(inst, src, inst.compose(dst[1], C.H[(k, l - 1)]), dst[2])
            else:
                H[(k, l)] = Q.H[(k - 1, l - 1)]
    for l in range(m + 2):
        for k in range(l):
            if l <= i:
                V[(k, l)] = C.V[(k, l)]
            elif k + 1 <= i:
                src, dst = po(k + 1, l - 1), po(k, l - 1)
                V[(k, l)] = _copair(
                    inst, src, inst.compose(dst[1], C.V[(k, l - 1)]), inst.compose(dst[2], P.V[(k, top)])
                )
            elif k == i:
                V[(k, l)] = inst.compose(po(i, l - 1)[1], be[(i, l - 1)])
            else:
                V[(k, l)] = Q.V[(k - 1, l - 1)]
    # fix the endpoints where the recipe reads the initial object
    for a in arrow_indices(m + 1):
        if slot_recipe("C", i, *a) == ("empty",):
            X[a] = inst.initial
    Ch = Flag.build(m + 1, X, H, V)

    Pn = reindex(inst, P, sigma_A(i, m, n), m + 2 + n)
    Qn = reindex(inst, Q, sigma_B(i, m, n), m + 2 + n)
    alpha, beta = {}, {}
    for k, l in arrow_indices(m + 1):
        if l <= i:
            alpha[(k, l)], beta[(k, l)] = al[(k, l)], be[(k, l)]
        elif k <= i:
            p = po(k, l - 1)
            alpha[(k, l)] = p[2]
            beta[(k, l)] = inst.compose(p[1], be[(k, l - 1)])
        else:
            alpha[(k, l)] = inst.initial_map(X[(k, l)])
            beta[(k, l)] = inst.identity(X[(k, l)])
    return AdditivityElement.build(m + 1, n, Pn, Qn, Ch, alpha, beta)


# ---------------------------------------------------------------------------
# verification


@dataclass
class IdentityResult:
    name: str
    ok: bool
    mode: str


def identity_checks(inst: SWInstance, e: AdditivityElement) -> list:
    """Every identity of the homotopy table that applies to ``e``, as ``(name, lhs, rhs)`` thunks."""
    m = e.m
    h = lambda j, x: homotopy_h(inst, j, x)  # noqa: E731
    d = lambda j, x: element_face(inst, x, j)  # noqa: E731
    s = lambda j, x: element_degeneracy(inst, x, j)  # noqa: E731
    out = [
        ("d0 h0 = Gamma", lambda: d(0, h(0, e)), lambda: Gamma(inst, e)),
        (f"d{m + 1} h{m} = id", lambda: d(m + 1, h(m, e)), lambda: e),
    ]
    for j in range(m + 1):
        for i_ in range(j):
            out.append((f"d{i_} h{j} = h{j - 1} d{i_}", lambda i_=i_, j=j: d(i_, h(j, e)), lambda i_=i_, j=j: h(j - 1, d(i_, e))))
    for j in range(m):
        out.append((f"d{j + 1} h{j + 1} = d{j + 1} h{j}", lambda j=j: d(j + 1, h(j + 1, e)), lambda j=j: d(j + 1, h(j, e))))
    for j in range(m + 1):
        for i_ in range(j + 2, m + 2):
            out.append((f"d{i_} h{j} = h{j} d{i_ - 1}", lambda i_=i_, j=j: d(i_, h(j, e)), lambda i_=i_, j=j: h(j, d(i_ - 1, e))))
    for j in range(m + 1):
        for i_ in range(m + 2):
            if i_ <= j:
                out.append((f"s{i_} h{j} = h{j + 1} s{i_}", lambda i_=i_, j=j: s(i_, h(j, e)), lambda i_=i_, j=j: h(j + 1, s(i_, e))))
            else:
                out.append((f"s{i_} h{j} = h{j} s{i_ - 1}", lambda i_=i_, j=j: s(i_, h(j, e)), lambda i_=i_, j=j: h(j, s(i_ - 1, e))))
    return out


def _family(name: str) -> str:
    return "".join(ch if not ch.isdigit() else "#" for ch in name).replace("##", "#")


def subtraction_cases(inst: SWInstance, i: int, hC: Flag) -> dict:
    """Certify ``(k, l, s)`` rows of the middle flag, bucketed by position relative to ``i``."""
    counts = {"l,s<=i": [0, 0], "l<=i<s": [0, 0], "i<l,s": [0, 0]}
    for k, l, s in itertools.combinations(range(hC.n + 1), 3):
        case = "l,s<=i" if s <= i else ("l<=i<s" if l <= i else "i<l,s")
        ok = inst.is_subtraction(h_map(inst, hC, k, l, s), v_map(inst, hC, k, l, s))
        counts[case][0] += 1
        counts[case][1] += int(ok)
    return counts


def _check_element(inst: SWInstance, e: AdditivityElement, validate: bool) -> CheckReport:
    rep = CheckReport("element")
    for name, lhs, rhs in identity_checks(inst, e):
        a, b = lhs(), rhs()
        rep.expect(a == b, _family(name), f"{name} fails", {"identity": name, "lhs": a.to_json(), "rhs": b.to_json()})
    if validate:
        for i in range(e.m + 1):
            he = homotopy_h(inst, i, e)
            rep.merge(validate_element(inst, he), prefix="h-output-")
            for key, (n_, ok) in subtraction_cases(inst, i, he.C).items():
                rep.tick(f"middle-row {key}", n_)
                if ok != n_:
                    rep.fail(f"middle-row {key}", "middle row is not a subtraction sequence", (i, e.to_json()))
    return rep


def _check_chunk(args):
    inst, chunk, validate = args
    return [_check_element(inst, e, validate) for e in chunk]


def verify_homotopy(inst: SWInstance, corpus, validate: bool = True, workers: int = 1) -> CheckReport:
    """Check every applicable identity strictly on each element of ``corpus``.

    Both sides are built from the same chosen pushouts and subtractions, so
    equality is strict equality of the resulting diagrams; a failure carries
    both diagrams.  With ``validate`` each ``h_i(e)`` is also validated and
    its middle rows certified.  ``workers > 1`` spreads elements over
    processes; per-element reports are merged in corpus order.
    """
    corpus = list(corpus)
    if workers > 1 and len(corpus) > 1:
        from concurrent.futures import ProcessPoolExecutor

        size = -(-len(corpus) // (4 * workers))
        chunks = [(inst, corpus[k : k + size], validate) for k in range(0, len(corpus), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = [r for batch in pool.map(_check_chunk, chunks) for r in batch]
    else:
        parts = [_check_element(inst, e, validate) for e in corpus]
    rep = CheckReport(f"homotopy identities over {getattr(inst, 'name', 'instance')}")
    for part in parts:
        rep.merge(part)
    rep.notes.append(f"elements={len(corpus)}")
    rep.notes.append(f"identities={identities_checked(rep)}")
    rep.notes.append("equality mode: strict (same chosen pushouts and subtractions on both sides)")
    return rep.finalize()


def identities_checked(rep: CheckReport) -> int:
    return sum(v for k, v in rep.checked.items() if k.startswith(("d", "s")) and " h" in k)


# ---------------------------------------------------------------------------
# corpora


def _supersets(inst: SWInstance, X, bound):
    for Y in inst.window(bound):
        for c in inst.subobjects(Y):
            if inst.source(c) == X:
                yield c


def _tail_chains(inst, X, n, bound):
    # chains X -> S_0 -> ... -> S_n of canonical subobjects
    def go(cur, k):
        if k == 0:
            yield []
            return
        for c in _supersets(inst, cur, bound):
            for rest in go(inst.target(c), k - 1):
                yield [c, *rest]

    yield from go(X, n + 1)


def element_from_sequence_flag(inst: SWInstance, F: Flag, tail_s: list, tail_t: list) -> AdditivityElement:
    """Assemble an element from a flag of subtraction sequences and two tails of cofibrations."""
    m = F.n
    n = len(tail_s) - 1
    A = [F.H[(0, l)].z for l in range(m)]
    B = [F.H[(0, l)].y for l in range(m)]
    P = flag_from_row(inst, A + list(tail_s))
    Q = flag_from_row(inst, B + list(tail_t))
    C = Flag.build(m, {a: o.X for a, o in F.objects}, {k: f.x for k, f in F.horiz}, {k: f.x for k, f in F.vert})
    alpha = {a: o.cof for a, o in F.objects}
    beta = {a: o.fib for a, o in F.objects}
    e = AdditivityElement.build(m, n, P, Q, C, alpha, beta)
    zero = {a: o.Z for a, o in F.objects}
    if any(P.X[a] != zero[a] for a in zero):
        raise StructuralError("outer-left flag does not match the chosen completion")
    return e


def exhaustive_corpus(inst: ConcreteInstance, max_m: int, max_n: int, bound=None) -> list:
    """Every element with canonical chains, ``m <= max_m`` and ``n <= max_n``."""
    F1 = build_f1_plus(inst, bound)
    out = []
    for m in range(max_m + 1):
        for F in enumerate_flags(F1, m, bound):
            Am, Bm = F.X[(0, m)].Z, F.X[(0, m)].Y
            for n in range(max_n + 1):
                for ts in _tail_chains(inst, Am, n, bound):
                    for tt in _tail_chains(inst, Bm, n, bound):
                        out.append(element_from_sequence_flag(inst, F, ts, tt))
    return out


def random_element(inst: ConcreteInstance, rng: random.Random, m: int, n: int) -> AdditivityElement:
    """A uniformly built random element with canonical chains."""
    top = max(inst.window(None), key=inst.size)
    atoms = sorted(inst.carrier(top), key=repr)
    F1 = build_f1_plus(inst, None)
    # each atom enters the middle chain at some step, on one side, or never
    entry = {x: (rng.randint(1, m + 1), rng.random() < 0.5) for x in atoms}
    cols = []
    for l in range(m + 1):
        C = frozenset(x for x, (t, _) in entry.items() if t <= l)
        Acar = frozenset(x for x in C if entry[x][1])
        Cobj = inst.sub(top, C)[0]
        cols.append((Cobj, Acar))
    seqs = [F1.seq(inst.sub(Cobj, Acar)[1]) for Cobj, Acar in cols]
    row = []
    for l in range(m):
        g = inst.sub(seqs[l + 1].X, inst.carrier(seqs[l].X))[1]
        lift = F1.lift(seqs[l], g, seqs[l + 1])
        if lift is None:
            raise StructuralError("random chain is not cartesian")
        row.append(lift)
    F = flag_from_row(F1, row) if m else empty_flag(F1, 0)

    def tail(start):
        out, cur = [], start
        for _ in range(n + 1):
            extra = [x for x in atoms if x not in inst.carrier(cur) and rng.random() < 0.35]
            nxt = inst.sub(top, inst.carrier(cur) | frozenset(extra))[0]
            out.append(inst.sub(nxt, inst.carrier(cur))[1])
            cur = nxt
        return out

    Z, Y = seqs[m].Z, seqs[m].Y
    return element_from_sequence_flag(inst, F, tail(Z), tail(Y))


def random_corpus(inst: ConcreteInstance, count: int, seed: int, max_m: int = 3, max_n: int = 2) -> list:
    rng = random.Random(seed)
    return [random_element(inst, rng, rng.randint(0, max_m), rng.randint(0, max_n)) for _ in range(count)]


# ---------------------------------------------------------------------------
# symbolic rendering of the slot grids


def _sub(k, l=None, top_row_short=True) -> str:
    if l is None:
        return str(k)
    if k == 0 and top_row_short:
        return str(l)
    return f"{{{k},{l}}}"


def render_recipe(part: str, r: tuple) -> str:
    kind = r[0]
    if kind == "empty":
        return "\\emptyset"
    if kind in ("A", "B", "C"):
        _, k, l = r
        return f"{kind}_{_sub(k, l)}"
    if kind == "S-A":
        k = r[1]
        if part == "C":
            return "S_0" if k == 0 else f"S_{{{k},0}}"
        return "S_0" if k == 0 else f"S_0 - A_{k}"
    if kind == "po":
        _, k, j = r
        s = "S_0" if k == 0 else f"S_{{{k},0}}"
        if k == j:  # gluing along the initial object
            return s
        return f"C_{_sub(k, j)} \\amalg_{{A_{_sub(k, j)}}} {s}"
    raise ValueError(f"unknown recipe {r!r}")


def render_slots(i: int, m: int) -> dict:
    slots = homotopy_slots(i, m)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "homotopy-slot-grid",
        "i": i,
        "m": m,
        "flags": {part: [[render_recipe(part, r) for r in row] for row in rows] for part, rows in slots.items()},
    }


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def golden_appendix_text() -> str:
    return dump_json(render_slots(3, 5))


def stored_appendix_text() -> str:
    return resources.files("swkit").joinpath("data/appendix_h3.json").read_text(encoding="utf-8")
