"""Bundled decidable instances: finite sets, finite G-sets, pointed finite sets."""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass
from functools import cached_property

from .core import (
    ConcreteInstance,
    Morphism,
    PreconditionError,
    StructuralError,
    canon,
    to_jsonable,
)


def atom(k: int) -> str:
    """The k-th atom of the fixed alphabet ``a, b, ..., z, a1, b1, ...``."""
    letters = string.ascii_lowercase
    q, r = divmod(k, len(letters))
    return letters[r] + (str(q) if q else "")


def atoms(n: int) -> tuple:
    return tuple(atom(k) for k in range(n))


def _by_size(objs, carrier):
    return tuple(sorted(objs, key=lambda X: (len(carrier(X)), canon(X))))


# ---------------------------------------------------------------------------
# finite sets


class FinSetInstance(ConcreteInstance):
    """Finite sets; the window is the power set of the first ``universe_size`` atoms."""

    def __init__(self, universe_size: int, **kw):
        if universe_size < 0:
            raise PreconditionError("universe_size must be non-negative")
        super().__init__(**kw)
        self.universe = atoms(universe_size)
        self.name = f"finset({universe_size})" + ("" if self.weq_is_iso else f"[weq={self.weq_name}]")
        self._windows: dict = {}

    @property
    def initial(self):
        return frozenset()

    def carrier(self, X):
        return X

    def make_sub(self, X, elements):
        return frozenset(elements)

    def assemble(self, elements, parts):
        return frozenset(elements)

    def window(self, bound):
        n = len(self.universe) if bound is None else min(bound, len(self.universe))
        if n not in self._windows:
            objs = [frozenset(c) for r in range(n + 1) for c in itertools.combinations(self.universe, r)]
            self._windows[n] = _by_size(objs, self.carrier)
        return self._windows[n]

    def compute_iso_label(self, X):
        return len(X)

    def describe(self, X) -> str:
        return "{" + ",".join(sorted(map(str, X), key=str)) + "}"


def finset_instance(universe_size: int, weq: str = "iso") -> FinSetInstance:
    """Finite sets over a universe of the given size.

    ``weq`` selects the weak equivalences: ``"iso"``, ``"cardinality"``
    (maps between sets of equal size), or ``"small-target"`` (isomorphisms
    plus every map into a set with at most one element, which breaks gluing).
    """
    if weq == "iso":
        return FinSetInstance(universe_size)
    if weq == "cardinality":
        return FinSetInstance(
            universe_size,
            weq=lambda f: len(f.source) == len(f.target),
            weq_name="cardinality",
            weq_key=len,
        )
    if weq == "small-target":
        return FinSetInstance(
            universe_size,
            weq=lambda f: len(f.target) <= 1 or (f.is_injective() and len(f.source) == len(f.target)),
            weq_name="small-target",
            weq_key=lambda X: None,
        )
    raise PreconditionError(f"unknown weak-equivalence class {weq!r}")


# ---------------------------------------------------------------------------
# finite groups and G-sets


class GroupTable:
    """Finite group given by its multiplication table on ``0..n-1``."""

    def __init__(self, table, name: str | None = None):
        rows = [list(r) for r in table]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise StructuralError("group table must be a non-empty square")
        if any(not isinstance(v, int) or not 0 <= v < n for r in rows for v in r):
            raise StructuralError("group table entries must lie in 0..n-1")
        units = [e for e in range(n) if rows[e] == list(range(n)) and [rows[g][e] for g in range(n)] == list(range(n))]
        if not units:
            raise StructuralError("group table has no identity element")
        self.e = units[0]
        for a, b, c in itertools.product(range(n), repeat=3):
            if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
                raise StructuralError(f"group table is not associative at ({a}, {b}, {c})")
        for a in range(n):
            if self.e not in rows[a]:
                raise StructuralError(f"element {a} has no inverse")
        self.n = n
        self.table = tuple(tuple(r) for r in rows)
        self.name = name or f"G{n}"

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self.table[a].index(self.e)

    @cached_property
    def generators(self) -> tuple:
        gens: list = []
        span = {self.e}
        for g in range(self.n):
            if g in span:
                continue
            gens.append(g)
            span = self._closure(gens)
        return tuple(gens)

    def _closure(self, gens):
        span = {self.e}
        frontier = [self.e]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = self.mul(g, a)
                    if b not in span:
                        span.add(b)
                        nxt.append(b)
            frontier = nxt
        return span

    def conjugacy_key(self, subgroup) -> tuple:
        """Canonical representative of the conjugacy class of a subgroup."""
        best = None
        for g in range(self.n):
            gi = self.inv(g)
            conj = tuple(sorted(self.mul(self.mul(g, h), gi) for h in subgroup))
            if best is None or conj < best:
                best = conj
        return best


def cyclic_group(n: int) -> GroupTable:
    return GroupTable([[(a + b) % n for b in range(n)] for a in range(n)], name=f"C{n}")


@dataclass(frozen=True)
class GSetObj:
    """Finite G-set: a carrier and the full action table ``((g, x), g.x)``."""

    carrier: frozenset
    action: tuple

    @cached_property
    def act(self) -> dict:
        return dict(self.action)

    @cached_property
    def _hash(self) -> int:
        return hash((self.carrier, self.action))

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return (canon(self.carrier), tuple((canon(k), canon(v)) for k, v in self.action))

    def to_json(self):
        return {"carrier": to_jsonable(self.carrier), "action": [[g, to_jsonable(x), to_jsonable(y)] for (g, x), y in self.action]}


def _make_gset(carrier, act: dict) -> GSetObj:
    return GSetObj(frozenset(carrier), tuple(sorted(act.items(), key=lambda kv: (kv[0][0], canon(kv[0][1])))))


class GSetInstance(ConcreteInstance):
    """Finite G-sets with equivariant maps; the window holds every action on the first atoms."""

    def __init__(self, group: GroupTable, max_elements: int, **kw):
        if max_elements < 0:
            raise PreconditionError("max_elements must be non-negative")
        super().__init__(**kw)
        self.group = group
        self.max_elements = max_elements
        self.name = f"gset({group.name},{max_elements})"
        self._windows: dict = {}

    @property
    def initial(self):
        return GSetObj(frozenset(), ())

    def carrier(self, X):
        return X.carrier

    def admissible(self, mapping, X, Y) -> bool:
        ax, ay = X.act, Y.act
        return all(mapping[ax[(g, x)]] == ay[(g, mapping[x])] for g in self.group.generators for x in X.carrier)

    def is_stable(self, X, elements) -> bool:
        return all(X.act[(g, x)] in elements for g in self.group.generators for x in elements)

    def make_sub(self, X, elements):
        return _make_gset(elements, {(g, x): X.act[(g, x)] for g in range(self.group.n) for x in elements})

    def assemble(self, elements, parts):
        act = {}
        for obj, jmap in parts:
            for (g, x), y in obj.action:
                act[(g, jmap[x])] = jmap[y]
        return _make_gset(elements, act)

    def product_object(self, X, Y, elements):
        act = {(g, (x, y)): (X.act[(g, x)], Y.act[(g, y)]) for g in range(self.group.n) for x, y in elements}
        return _make_gset(elements, act)

    def trivial(self, carrier) -> GSetObj:
        """``carrier`` with every group element acting as the identity."""
        return _make_gset(carrier, {(g, x): x for g in range(self.group.n) for x in carrier})

    def actions_on(self, carrier) -> list:
        """Every action of the group on ``carrier`` (sorted list of atoms)."""
        G = self.group
        gens = G.generators
        out = []
        for perms in itertools.product(itertools.permutations(carrier), repeat=len(gens)):
            gen_map = {g: dict(zip(carrier, p)) for g, p in zip(gens, perms)}
            act = self._extend(gen_map, carrier)
            if act is not None:
                out.append(act)
        return out

    def _extend(self, gen_map, carrier):
        G = self.group
        rep = {G.e: {x: x for x in carrier}}
        frontier = [G.e]
        while frontier:
            nxt = []
            for a in frontier:
                for g, pg in gen_map.items():
                    b = G.mul(g, a)
                    cand = {x: pg[rep[a][x]] for x in carrier}
                    if b in rep:
                        if rep[b] != cand:
                            return None
                    else:
                        rep[b] = cand
                        nxt.append(b)
            frontier = nxt
        # homomorphism check on the whole table
        for a in range(G.n):
            for b in range(G.n):
                ab = G.mul(a, b)
                if any(rep[ab][x] != rep[a][rep[b][x]] for x in carrier):
                    return None
        return {(g, x): rep[g][x] for g in range(G.n) for x in carrier}

    def window(self, bound):
        n = self.max_elements if bound is None else min(bound, self.max_elements)
        if n not in self._windows:
            objs = []
            for r in range(n + 1):
                for c in itertools.combinations(atoms(self.max_elements), r):
                    for act in self.actions_on(list(c)):
                        objs.append(_make_gset(c, act))
            self._windows[n] = _by_size(objs, self.carrier)
        return self._windows[n]

    def orbits(self, X) -> list:
        seen, out = set(), []
        for x in sorted(X.carrier, key=canon):
            if x in seen:
                continue
            orb = frozenset(X.act[(g, x)] for g in range(self.group.n))
            seen |= orb
            out.append((x, orb))
        return out

    def orbit_type(self, X, x) -> tuple:
        stab = [g for g in range(self.group.n) if X.act[(g, x)] == x]
        return self.group.conjugacy_key(stab)

    def compute_iso_label(self, X):
        return tuple(sorted(self.orbit_type(X, x) for x, _ in self.orbits(X)))

    def describe(self, X) -> str:
        parts = ["{" + ",".join(sorted(map(str, o))) + "}" for _, o in self.orbits(X)]
        return "+".join(parts) if parts else "0"


def gset_instance(group, max_elements: int) -> GSetInstance:
    """G-sets of at most ``max_elements`` elements; ``group`` is a table or a GroupTable."""
    if not isinstance(group, GroupTable):
        group = GroupTable(group)
    return GSetInstance(group, max_elements)


# ---------------------------------------------------------------------------
# pointed finite sets


@dataclass(frozen=True)
class PMap:
    """Basepoint-preserving map ``[source]_+ -> [target]_+``; ``images[0]`` is the basepoint."""

    source: int
    target: int
    images: tuple

    def __call__(self, i: int) -> int:
        return self.images[i]

    def preimage(self, j: int) -> list:
        return [i for i in range(1, self.source + 1) if self.images[i] == j]

    def to_json(self):
        return {"source": self.source, "target": self.target, "images": list(self.images)}


class PointedSets:
    """Pointed finite sets ``[n]_+ = {*, 1..n}`` with ``n <= max_size``.

    Cofibrations are monomorphisms, weak equivalences are isomorphisms, and a
    fibration is a map in which every non-basepoint target has exactly one
    preimage.
    """

    def __init__(self, max_size: int):
        if max_size < 0:
            raise PreconditionError("max_size must be non-negative")
        self.max_size = max_size
        self.name = f"finset+({max_size})"

    def objects(self) -> tuple:
        return tuple(range(self.max_size + 1))

    def make(self, source: int, target: int, images) -> PMap:
        images = tuple(images)
        if len(images) != source + 1 or images[0] != 0 or any(not 0 <= v <= target for v in images):
            raise PreconditionError("not a basepoint-preserving map")
        return PMap(source, target, images)

    def hom(self, n: int, m: int) -> tuple:
        return tuple(PMap(n, m, (0, *rest)) for rest in itertools.product(range(m + 1), repeat=n))

    def identity(self, n: int) -> PMap:
        return PMap(n, n, tuple(range(n + 1)))

    def compose(self, g: PMap, f: PMap) -> PMap:
        if f.target != g.source:
            raise PreconditionError("maps are not composable")
        return PMap(f.source, g.target, tuple(g.images[v] for v in f.images))

    def is_cofibration(self, f: PMap) -> bool:
        vals = f.images[1:]
        return 0 not in vals and len(set(vals)) == len(vals)

    def is_fibration(self, p: PMap) -> bool:
        return all(len(p.preimage(j)) == 1 for j in range(1, p.target + 1))

    def is_iso(self, f: PMap) -> bool:
        return f.source == f.target and self.is_cofibration(f)

    def cofibrations(self, n: int, m: int) -> tuple:
        return tuple(PMap(n, m, (0, *p)) for p in itertools.permutations(range(1, m + 1), n))

    def fibrations(self, n: int, m: int) -> tuple:
        return tuple(p for p in self.hom(n, m) if self.is_fibration(p))

    def cofiber(self, f: PMap) -> PMap:
        """Projection ``[m]_+ -> [m-n]_+`` collapsing the image of a monomorphism."""
        if not self.is_cofibration(f):
            raise PreconditionError("cofiber is taken of a monomorphism")
        image = set(f.images)
        rest = [j for j in range(1, f.target + 1) if j not in image]
        index = {j: k + 1 for k, j in enumerate(rest)}
        return PMap(f.target, len(rest), tuple(index.get(j, 0) for j in range(f.target + 1)))

    def is_pushout_along_basepoint(self, f: PMap, q: PMap) -> bool:
        """``[n] -> [m] -> [m-n]`` is the pushout of ``f`` against ``[n]_+ -> [0]_+``."""
        if any(q(f(i)) != 0 for i in range(f.source + 1)):
            return False
        rest = [j for j in range(1, f.target + 1) if j not in set(f.images)]
        return sorted(q(j) for j in rest) == list(range(1, q.target + 1)) and len(rest) == q.target


def finsetplus_instance(max_size: int) -> PointedSets:
    return PointedSets(max_size)


def wrongway_cof(f: PMap) -> PMap:
    """``f^*`` for a monomorphism: inverse on the image, corange to the basepoint."""
    vals = f.images[1:]
    if 0 in vals or len(set(vals)) != len(vals):
        raise PreconditionError("wrong-way map needs an injective map")
    back = [0] * (f.target + 1)
    for i in range(1, f.source + 1):
        back[f.images[i]] = i
    return PMap(f.target, f.source, tuple(back))


def wrongway_fib(p: PMap) -> PMap:
    """``p^*`` for a fibration: each non-basepoint goes to its unique preimage."""
    out = [0]
    for j in range(1, p.target + 1):
        pre = p.preimage(j)
        if len(pre) != 1:
            raise PreconditionError("wrong-way map needs a fibration")
        out.append(pre[0])
    return PMap(p.target, p.source, tuple(out))


def wrongway_square_commutes(cat: PointedSets, i1: PMap, p1: PMap, i2: PMap, p2: PMap) -> bool:
    """For ``p2 i1 = i2 p1`` (monos ``i``, fibrations ``p``), compare ``i1 p1^*`` with ``p2^* i2``."""
    return cat.compose(i1, wrongway_fib(p1)) == cat.compose(wrongway_fib(p2), i2)


def commuting_mono_fib_squares(cat: PointedSets, max_size: int):
    """Every square ``A -i1-> B -p2-> D``, ``A -p1-> C -i2-> D`` that commutes."""
    sizes = range(max_size + 1)
    for a, b, c, d in itertools.product(sizes, repeat=4):
        if c > a or d > b or a > b or c > d:
            continue
        for i1 in cat.cofibrations(a, b):
            for p2 in cat.fibrations(b, d):
                top = cat.compose(p2, i1)
                for p1 in cat.fibrations(a, c):
                    for i2 in cat.cofibrations(c, d):
                        if cat.compose(i2, p1) == top:
                            yield i1, p1, i2, p2


# ---------------------------------------------------------------------------
# deliberately broken instances used to exercise the checkers


class _IdentityNotCofibration(FinSetInstance):
    def is_cofibration(self, f) -> bool:
        if f.source == f.target == frozenset({"a"}) and f.is_identity_on_elements():
            return False
        return super().is_cofibration(f)


class _MissingSubtraction(FinSetInstance):
    def _dropped(self, c) -> bool:
        return c.source == frozenset({"a"}) and c.target == frozenset({"a", "b"})

    def subtraction(self, c):
        return None if self._dropped(c) else super().subtraction(c)

    def is_subtraction(self, c, f) -> bool:
        return not self._dropped(c) and super().is_subtraction(c, f)


class _CollapsingPushout(FinSetInstance):
    """Gluing two points over the empty set to a single point."""

    def pushout(self, c1, c2):
        X, Y = c1.target, c2.target
        if not c1.source and len(X) == 1 and len(Y) == 1 and X != Y:
            P = frozenset({"a"})
            return P, Morphism.from_mapping(X, P, {x: "a" for x in X}), Morphism.from_mapping(Y, P, {y: "a" for y in Y})
        return super().pushout(c1, c2)


def counterexample(kind: str, universe_size: int = 2) -> FinSetInstance:
    """Finite-set instances that violate exactly one family of axioms."""
    table = {
        "identity-not-cofibration": _IdentityNotCofibration,
        "missing-subtraction": _MissingSubtraction,
        "noncartesian-pushout": _CollapsingPushout,
    }
    if kind == "nongluing-weq":
        return finset_instance(universe_size, weq="small-target")
    if kind not in table:
        raise PreconditionError(f"unknown counterexample {kind!r}")
    inst = table[kind](universe_size)
    inst.name = f"{kind}({universe_size})"
    return inst
