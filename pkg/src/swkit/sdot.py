"""Flags of the modified S-construction: validation, faces, degeneracies, enumeration.

A degree-``n`` flag assigns an object ``X[i, j]`` to every ``0 <= i <= j <= n``
with cofibrations ``X[i, j] -> X[i, j+1]`` along rows and fibration legs
``X[i+1, j] -> X[i, j]`` down columns.  Longer arrows are composites.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .core import (
    BudgetExceeded,
    CheckReport,
    ConcreteInstance,
    PreconditionError,
    StructuralError,
    SWInstance,
    TabulatedInstance,
    to_jsonable,
)


def arrow_indices(n: int) -> list:
    """Objects of the arrow category: pairs ``(i, j)`` with ``0 <= i <= j <= n``."""
    return [(i, j) for i in range(n + 1) for j in range(i, n + 1)]


def arrow_leq(a: tuple, b: tuple) -> bool:
    """``(i, j) -> (i', j')`` exists iff ``i' <= i`` and ``j <= j'``."""
    return b[0] <= a[0] and a[1] <= b[1]


@dataclass(frozen=True)
class Flag:
    """An ``n``-simplex: object grid plus adjacent horizontal and vertical arrows.

    ``horiz[(i, j)]`` is ``X[i, j] -> X[i, j+1]``; ``vert[(i, j)]`` is
    ``X[i+1, j] -> X[i, j]``.  All three are stored as sorted item tuples so
    flags hash and compare by value.
    """

    n: int
    objects: tuple
    horiz: tuple
    vert: tuple

    @classmethod
    def build(cls, n: int, objects: dict, horiz: dict, vert: dict) -> "Flag":
        return cls(n, tuple(sorted(objects.items())), tuple(sorted(horiz.items())), tuple(sorted(vert.items())))

    @cached_property
    def X(self) -> dict:
        return dict(self.objects)

    @cached_property
    def H(self) -> dict:
        return dict(self.horiz)

    @cached_property
    def V(self) -> dict:
        return dict(self.vert)

    def top_row(self) -> tuple:
        return tuple(self.X[(0, j)] for j in range(self.n + 1))

    def to_json(self):
        return {
            "degree": self.n,
            "objects": [[i, j, to_jsonable(o)] for (i, j), o in self.objects],
            "horizontal": [[i, j, to_jsonable(m)] for (i, j), m in self.horiz],
            "vertical": [[i, j, to_jsonable(m)] for (i, j), m in self.vert],
        }


def h_map(inst: SWInstance, F: Flag, i: int, j: int, k: int):
    """Composite cofibration ``X[i, j] -> X[i, k]`` for ``j <= k``."""
    m = inst.identity(F.X[(i, j)])
    for t in range(j, k):
        m = inst.compose(F.H[(i, t)], m)
    return m


def v_map(inst: SWInstance, F: Flag, i: int, j: int, k: int):
    """Composite leg ``X[j, k] -> X[i, k]`` for ``i <= j``."""
    m = inst.identity(F.X[(j, k)])
    for t in range(j - 1, i - 1, -1):
        m = inst.compose(F.V[(t, k)], m)
    return m


def validate_flag(inst: SWInstance, F: Flag) -> CheckReport:
    """Every condition of a simplex of the construction, with offending indices."""
    rep = CheckReport(f"flag of degree {F.n}")
    n = F.n
    idx = arrow_indices(n)
    if set(F.X) != set(idx):
        raise StructuralError("flag object grid does not match its degree")
    if set(F.H) != {(i, j) for i in range(n + 1) for j in range(i, n)}:
        raise StructuralError("flag horizontal arrows do not match its degree")
    if set(F.V) != {(i, j) for j in range(n + 1) for i in range(j)}:
        raise StructuralError("flag vertical arrows do not match its degree")
    if isinstance(inst, TabulatedInstance):
        known = set(inst.window(None))
        for a, o in F.objects:
            if o not in known:
                raise StructuralError(f"object identifier {o!r} at {a} is not in the instance")
        for key, m in (*F.horiz, *F.vert):
            if m not in inst.morphisms:
                raise StructuralError(f"morphism identifier {m!r} at {key} is not in the instance")

    for (i, j), m in F.horiz:
        ok = inst.source(m) == F.X[(i, j)] and inst.target(m) == F.X[(i, j + 1)]
        rep.expect(ok, "shape", "horizontal arrow has the wrong endpoints", (i, j))
        rep.expect(inst.is_cofibration(m), "cofibration", "horizontal arrow is not a cofibration", (i, j))
    for (i, j), m in F.vert:
        ok = inst.source(m) == F.X[(i + 1, j)] and inst.target(m) == F.X[(i, j)]
        rep.expect(ok, "shape", "vertical arrow has the wrong endpoints", (i, j))
        rep.expect(inst.is_fibration(m), "fibration", "vertical arrow is not a fibration", (i, j))
    if not rep.ok:
        return rep.finalize()

    for i in range(n + 1):
        rep.expect(F.X[(i, i)] == inst.initial, "basepoint", "diagonal entry is not the initial object", (i, i))

    for i, j, k in itertools.combinations_with_replacement(range(n + 1), 3):
        rep.expect(
            inst.is_subtraction(h_map(inst, F, i, j, k), v_map(inst, F, i, j, k)),
            "subtraction",
            "row and column arrows do not form a subtraction sequence",
            (i, j, k),
        )

    for i, j, k, l in itertools.combinations_with_replacement(range(n + 1), 4):
        top = h_map(inst, F, j, k, l)
        left = v_map(inst, F, i, j, k)
        right = v_map(inst, F, i, j, l)
        bottom = h_map(inst, F, i, k, l)
        if not rep.expect(
            inst.compose(right, top) == inst.compose(bottom, left), "commute", "square does not commute", (i, j, k, l)
        ):
            continue
        rep.expect(inst.is_cartesian(top, left, right, bottom), "cartesian", "square is not cartesian", (i, j, k, l))
    return rep.finalize()


def is_valid(inst: SWInstance, F: Flag) -> bool:
    return validate_flag(inst, F).ok


def reindex(inst: SWInstance, F: Flag, sigma: Sequence[int], m: int) -> Flag:
    """Pull a flag back along a monotone map ``sigma: [m] -> [n]``."""
    sig = list(sigma)
    if len(sig) != m + 1 or any(a > b for a, b in zip(sig, sig[1:])) or (sig and (sig[0] < 0 or sig[-1] > F.n)):
        raise PreconditionError("reindexing needs a monotone map into the flag's degree")
    objects = {(a, b): F.X[(sig[a], sig[b])] for a, b in arrow_indices(m)}
    horiz = {(a, b): h_map(inst, F, sig[a], sig[b], sig[b + 1]) for a in range(m + 1) for b in range(a, m)}
    vert = {(a, b): v_map(inst, F, sig[a], sig[a + 1], sig[b]) for b in range(m + 1) for a in range(b)}
    return Flag.build(m, objects, horiz, vert)


def face(inst: SWInstance, k: int, F: Flag) -> Flag:
    """``d_k``: delete row and column ``k``."""
    if not 0 <= k <= F.n or F.n == 0:
        raise PreconditionError(f"face index {k} out of range for degree {F.n}")
    sig = [a if a < k else a + 1 for a in range(F.n)]
    return reindex(inst, F, sig, F.n - 1)


def degeneracy(inst: SWInstance, i: int, F: Flag) -> Flag:
    """``s_i``: repeat row and column ``i`` with identity arrows."""
    if not 0 <= i <= F.n:
        raise PreconditionError(f"degeneracy index {i} out of range for degree {F.n}")
    sig = [a if a <= i else a - 1 for a in range(F.n + 2)]
    return reindex(inst, F, sig, F.n + 1)


def empty_flag(inst: SWInstance, n: int) -> Flag:
    e = inst.initial
    ide = inst.identity(e)
    idx = arrow_indices(n)
    return Flag.build(
        n,
        {a: e for a in idx},
        {(i, j): ide for i in range(n + 1) for j in range(i, n)},
        {(i, j): ide for j in range(n + 1) for i in range(j)},
    )


def _complete(inst: SWInstance, n: int, row0: list) -> Flag:
    X = {(0, 0): inst.initial}
    H: dict = {}
    for j, m in enumerate(row0):
        X[(0, j + 1)] = inst.target(m)
        H[(0, j)] = m
    V: dict = {}
    for i in range(1, n + 1):
        X[(i, i)] = inst.initial
        for k in range(i, n + 1):
            # leg of X[i-1, i] -> X[i-1, k]
            inc = inst.identity(X[(i - 1, i)])
            for t in range(i, k):
                inc = inst.compose(H[(i - 1, t)], inc)
            leg = inst.subtraction(inc)
            if leg is None:
                raise PreconditionError("a cofibration in the chain has no subtraction leg")
            if k == i:
                leg = inst.initial_map(X[(i - 1, i)])
            X[(i, k)] = inst.source(leg)
            V[(i - 1, k)] = leg
        for k in range(i, n):
            via = inst.compose(H[(i - 1, k)], V[(i - 1, k)])
            u = inst.factor(via, V[(i - 1, k + 1)])
            if u is None:
                raise PreconditionError("row arrow does not factor through the chosen leg")
            H[(i, k)] = u
    return Flag.build(n, X, H, V)


def flag_from_row(inst: SWInstance, row0: Sequence) -> Flag:
    """Flag of degree ``len(row0)`` from its top row ``X[0,0] -> X[0,1] -> ...``."""
    n = len(row0)
    if n == 0:
        return empty_flag(inst, 0)
    return _complete(inst, n, list(row0))


def count_chains(inst: SWInstance, n: int, bound) -> int:
    """Number of chains of canonical subobjects of length ``n`` ending in the window."""
    total = 0
    memo: dict = {}

    def below(X, k):
        if k == 0:
            return 1 if X == inst.initial else 0
        key = (X, k)
        if key not in memo:
            memo[key] = sum(below(inst.source(c), k - 1) for c in inst.subobjects(X))
        return memo[key]

    for top in inst.window(bound):
        total += below(top, n)
    return total


def enumerate_flags(inst: SWInstance, n: int, bound, budget: int = 200_000) -> list:
    """Every flag of degree ``n`` whose top row is a chain of canonical subobjects."""
    if n == 0:
        return [empty_flag(inst, 0)]
    est = count_chains(inst, n, bound)
    if est > budget:
        raise BudgetExceeded(f"flags of degree {n}", est, budget)
    out = []

    def chains(X, k):
        # chains of k cofibrations from the initial object ending at X
        if k == 0:
            if X == inst.initial:
                yield []
            return
        for c in inst.subobjects(X):
            for rest in chains(inst.source(c), k - 1):
                yield [*rest, c]

    for top in inst.window(bound):
        for ch in chains(top, n):
            out.append(_complete(inst, n, ch))
    return out


# ---------------------------------------------------------------------------
# iterated construction


@dataclass(frozen=True)
class BiFlag:
    """Object of the doubly iterated construction.

    ``objects`` is keyed by ``(a, b)`` with ``a`` in the degree-``n1`` arrow
    grid and ``b`` in the degree-``n2`` one.  ``h1``/``v1`` are the adjacent
    arrows in the first direction (keyed like :class:`Flag` arrows, paired
    with ``b``); ``h2``/``v2`` likewise in the second direction.
    """

    n1: int
    n2: int
    objects: tuple
    h1: tuple
    v1: tuple
    h2: tuple
    v2: tuple

    @classmethod
    def build(cls, n1, n2, objects, h1, v1, h2, v2) -> "BiFlag":
        srt = lambda d: tuple(sorted(d.items()))  # noqa: E731
        return cls(n1, n2, srt(objects), srt(h1), srt(v1), srt(h2), srt(v2))

    @cached_property
    def F(self) -> dict:
        return dict(self.objects)

    @cached_property
    def maps(self) -> dict:
        return {"h1": dict(self.h1), "v1": dict(self.v1), "h2": dict(self.h2), "v2": dict(self.v2)}

    def slice1(self, b) -> Flag:
        """Flag in the first direction at fixed second index ``b``."""
        M = self.maps
        return Flag.build(
            self.n1,
            {a: self.F[(a, b)] for a in arrow_indices(self.n1)},
            {a: M["h1"][(a, b)] for a in _hkeys(self.n1)},
            {a: M["v1"][(a, b)] for a in _vkeys(self.n1)},
        )

    def slice2(self, a) -> Flag:
        M = self.maps
        return Flag.build(
            self.n2,
            {b: self.F[(a, b)] for b in arrow_indices(self.n2)},
            {b: M["h2"][(a, b)] for b in _hkeys(self.n2)},
            {b: M["v2"][(a, b)] for b in _vkeys(self.n2)},
        )


def _hkeys(n):
    return [(i, j) for i in range(n + 1) for j in range(i, n)]


def _vkeys(n):
    return [(i, j) for j in range(n + 1) for i in range(j)]


def _arrows(n: int, kind: str):
    """Adjacent arrows of the arrow grid as ``(key, source index, target index)``."""
    if kind == "h":
        return [((i, j), (i, j), (i, j + 1)) for i, j in _hkeys(n)]
    return [((i, j), (i + 1, j), (i, j)) for i, j in _vkeys(n)]


def validate_biflag(inst: SWInstance, B: BiFlag) -> CheckReport:
    rep = CheckReport(f"biflag of degree ({B.n1}, {B.n2})")
    M = B.maps
    for a in arrow_indices(B.n1):
        for b in arrow_indices(B.n2):
            if a[0] == a[1] or b[0] == b[1]:
                rep.expect(B.F[(a, b)] == inst.initial, "basepoint", "entry on a diagonal is not initial", (a, b))
    for b in arrow_indices(B.n2):
        sub = validate_flag(inst, B.slice1(b))
        rep.merge(sub, prefix="dir1-")
    for a in arrow_indices(B.n1):
        sub = validate_flag(inst, B.slice2(a))
        rep.merge(sub, prefix="dir2-")
    # mixed squares: one adjacent arrow in each direction
    for k1 in ("h", "v"):
        for key1, as_, at in _arrows(B.n1, k1):
            for k2 in ("h", "v"):
                for key2, bs, bt in _arrows(B.n2, k2):
                    m1_s = M[k1 + "1"][(key1, bs)]
                    m1_t = M[k1 + "1"][(key1, bt)]
                    m2_s = M[k2 + "2"][(as_, key2)]
                    m2_t = M[k2 + "2"][(at, key2)]
                    w = (k1, key1, k2, key2)
                    if not rep.expect(
                        inst.compose(m2_t, m1_s) == inst.compose(m1_t, m2_s), "mixed", "mixed square does not commute", w
                    ):
                        continue
                    rep.expect(inst.is_cartesian(m1_s, m2_s, m2_t, m1_t), "mixed", "mixed square is not cartesian", w)
    return rep.finalize()


def external_product(inst: ConcreteInstance, F: Flag, G: Flag) -> BiFlag:
    """``(a, b) -> F[a] x G[b]`` with product arrows."""
    if not isinstance(inst, ConcreteInstance):
        raise PreconditionError("external products need an instance with cartesian products")
    objs, h1, v1, h2, v2 = {}, {}, {}, {}, {}
    for a in arrow_indices(F.n):
        for b in arrow_indices(G.n):
            objs[(a, b)] = inst.product(F.X[a], G.X[b])
    for b in arrow_indices(G.n):
        idb = inst.identity(G.X[b])
        for a in _hkeys(F.n):
            h1[(a, b)] = inst.product_map(F.H[a], idb)
        for a in _vkeys(F.n):
            v1[(a, b)] = inst.product_map(F.V[a], idb)
    for a in arrow_indices(F.n):
        ida = inst.identity(F.X[a])
        for b in _hkeys(G.n):
            h2[(a, b)] = inst.product_map(ida, G.H[b])
        for b in _vkeys(G.n):
            v2[(a, b)] = inst.product_map(ida, G.V[b])
    return BiFlag.build(F.n, G.n, objs, h1, v1, h2, v2)


def flags_isomorphic(inst: SWInstance, F: Flag, G: Flag) -> bool:
    """Levelwise isomorphism compatible with every arrow (brute force)."""
    if F.n != G.n:
        return False
    idx = arrow_indices(F.n)
    choices = [inst.isomorphisms(F.X[a], G.X[a]) for a in idx]
    if any(not c for c in choices):
        return False
    for combo in itertools.product(*choices):
        phi = dict(zip(idx, combo))
        if all(
            inst.compose(phi[(i, j + 1)], F.H[(i, j)]) == inst.compose(G.H[(i, j)], phi[(i, j)]) for i, j in _hkeys(F.n)
        ) and all(
            inst.compose(phi[(i, j)], F.V[(i, j)]) == inst.compose(G.V[(i, j)], phi[(i + 1, j)]) for i, j in _vkeys(F.n)
        ):
            return True
    return False



def check_simplicial_identities(inst: SWInstance, flags) -> CheckReport:
    """Face and degeneracy identities on each flag, compared as stored diagrams."""
    rep = CheckReport(f"simplicial identities over {getattr(inst, 'name', 'instance')}")
    d = lambda k, F: face(inst, k, F)  # noqa: E731
    s = lambda k, F: degeneracy(inst, k, F)  # noqa: E731
    for F in flags:
        n = F.n
        for j in range(n + 1):
            for i in range(j):
                if n >= 2:
                    rep.expect(d(i, d(j, F)) == d(j - 1, d(i, F)), "d_i d_j = d_{j-1} d_i", f"fails for i={i}, j={j}", F)
        for j in range(n + 1):
            for i in range(n + 2):
                lhs = d(i, s(j, F))
                if i < j:
                    rhs = s(j - 1, d(i, F)) if n >= 1 else None
                    if rhs is not None:
                        rep.expect(lhs == rhs, "d_i s_j = s_{j-1} d_i", f"fails for i={i}, j={j}", F)
                elif i in (j, j + 1):
                    rep.expect(lhs == F, "d_j s_j = d_{j+1} s_j = id", f"fails for i={i}, j={j}", F)
                elif n >= 1:
                    rep.expect(lhs == s(j, d(i - 1, F)), "d_i s_j = s_j d_{i-1}", f"fails for i={i}, j={j}", F)
        for j in range(n + 1):
            for i in range(j + 1):
                rep.expect(s(i, s(j, F)) == s(j + 1, s(i, F)), "s_i s_j = s_{j+1} s_i", f"fails for i={i}, j={j}", F)
    return rep.finalize()
