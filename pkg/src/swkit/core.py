"""Abstract SW-category contract, concrete and tabulated realizations, axiom checkers.

An instance exposes a bounded *window* of objects together with the
operations the checkers need: hom-sets, composition, the cofibration /
fibration / weak-equivalence predicates, certified subtraction legs, and
chosen pullbacks and pushouts.  Two realizations are provided:

* :class:`ConcreteInstance` -- objects carry finite carriers and morphisms
  are functions between them.  Limits and colimits are computed element-wise.
* :class:`TabulatedInstance` -- everything is an explicit table and the
  universal properties are checked by brute force over the table.
"""

from __future__ import annotations

import itertools
import json
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Any, Callable, Hashable, Iterable, Sequence


class StructuralError(ValueError):
    """Malformed instance data (dangling identifiers, bad tables)."""


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class BudgetExceeded(RuntimeError):
    """A bounded enumeration would exceed its configured budget."""

    def __init__(self, what: str, required: int, budget: int):
        super().__init__(f"{what}: requires {required}, budget is {budget}")
        self.required = required
        self.budget = budget


class PushoutTableIncomplete(StructuralError):
    def __init__(self, span):
        super().__init__(f"pushout table incomplete: no choice for span {span!r}")
        self.span = span


def canon(x: Any):
    """Total, hash-seed independent sort key for the values used as atoms and objects."""
    if isinstance(x, bool):
        return ("b", int(x))
    if isinstance(x, int):
        return ("i", x)
    if isinstance(x, str):
        return ("s", x)
    if isinstance(x, tuple):
        return ("t", tuple(canon(e) for e in x))
    if isinstance(x, (frozenset, set)):
        return ("f", tuple(sorted(canon(e) for e in x)))
    if x is None:
        return ("n",)
    key = getattr(x, "sort_key", None)
    if key is not None:
        return ("o", type(x).__name__, key())
    raise TypeError(f"no canonical ordering for {type(x).__name__}")


@lru_cache(maxsize=None)
def sorted_elems(carrier: frozenset) -> tuple:
    """Carrier elements in canonical order (cached per carrier)."""
    return tuple(sorted(carrier, key=canon))


def to_jsonable(x: Any):
    """Deterministic JSON encoding of atoms, carriers and objects."""
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, (tuple, list)):
        return [to_jsonable(e) for e in x]
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (frozenset, set)):
        return [to_jsonable(e) for e in sorted(x, key=canon)]
    enc = getattr(x, "to_json", None)
    if enc is not None:
        return enc()
    raise TypeError(f"cannot encode {type(x).__name__}")


@dataclass(frozen=True)
class Morphism:
    """A function between the carriers of two concrete objects."""

    source: Any
    target: Any
    pairs: tuple

    @classmethod
    def from_mapping(cls, source, target, mapping) -> "Morphism":
        if not hasattr(mapping, "items"):
            mapping = dict(mapping)
        return cls(source, target, tuple((k, mapping[k]) for k in sorted_elems(frozenset(mapping))))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Morphism) or self._hash != other._hash:
            return False
        return self.pairs == other.pairs and self.source == other.source and self.target == other.target

    @cached_property
    def table(self) -> dict:
        return dict(self.pairs)

    @cached_property
    def _hash(self) -> int:
        return hash((self.source, self.target, self.pairs))

    def __hash__(self):
        return self._hash

    def __call__(self, x):
        return self.table[x]

    def image(self) -> frozenset:
        return frozenset(self.table.values())

    def is_injective(self) -> bool:
        return len(set(self.table.values())) == len(self.pairs)

    def is_identity_on_elements(self) -> bool:
        return all(a == b for a, b in self.pairs)

    def sort_key(self):
        return (canon(self.source), canon(self.target), tuple((canon(a), canon(b)) for a, b in self.pairs))

    def to_json(self):
        return {
            "source": to_jsonable(self.source),
            "target": to_jsonable(self.target),
            "map": [[to_jsonable(a), to_jsonable(b)] for a, b in self.pairs],
        }


@dataclass(frozen=True)
class Violation:
    axiom: str
    message: str
    witness: Any = None

    def to_json(self):
        return {"axiom": self.axiom, "message": self.message, "witness": _describe(self.witness)}


def _describe(w):
    if w is None:
        return None
    if isinstance(w, dict):
        return {str(k): _describe(v) for k, v in sorted(w.items())}
    if isinstance(w, (list, tuple)):
        return [_describe(v) for v in w]
    try:
        return to_jsonable(w)
    except TypeError:
        return repr(w)


@dataclass
class CheckReport:
    """Outcome of a bounded exhaustive check.

    ``checked`` counts configurations examined per axiom; ``violations`` is
    sorted deterministically when the report is finalized.
    """

    name: str
    checked: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def tick(self, axiom: str, n: int = 1):
        self.checked[axiom] = self.checked.get(axiom, 0) + n

    def fail(self, axiom: str, message: str, witness=None):
        self.violations.append(Violation(axiom, message, witness))

    def expect(self, cond: bool, axiom: str, message: str, witness=None) -> bool:
        self.tick(axiom)
        if not cond:
            self.fail(axiom, message, witness)
        return cond

    def finalize(self) -> "CheckReport":
        self.violations.sort(key=lambda v: (v.axiom, v.message, json.dumps(_describe(v.witness), sort_keys=True, default=str)))
        return self

    def axioms_violated(self) -> list:
        return sorted({v.axiom for v in self.violations})

    def to_json(self):
        return {
            "name": self.name,
            "ok": self.ok,
            "checked": dict(sorted(self.checked.items())),
            "violations": [v.to_json() for v in self.violations],
            "notes": list(self.notes),
        }

    def merge(self, other: "CheckReport", prefix: str = "") -> None:
        for k, v in other.checked.items():
            self.tick(prefix + k, v)
        for v in other.violations:
            self.violations.append(Violation(prefix + v.axiom, v.message, v.witness))
        self.notes.extend(other.notes)


# ---------------------------------------------------------------------------
# abstract contract


class SWInstance(ABC):
    """Decidable realization of an SW-category, restricted to a bounded window."""

    name: str = "instance"
    #: True when weak equivalences are exactly the isomorphisms
    weq_is_iso: bool = True

    # -- category structure ------------------------------------------------
    @property
    @abstractmethod
    def initial(self): ...

    @abstractmethod
    def window(self, bound) -> tuple:
        """Objects whose size is at most ``bound``, in canonical order."""

    @abstractmethod
    def hom(self, X, Y) -> tuple: ...

    @abstractmethod
    def source(self, f): ...

    @abstractmethod
    def target(self, f): ...

    @abstractmethod
    def compose(self, g, f):
        """``g ∘ f``."""

    @abstractmethod
    def identity(self, X): ...

    @abstractmethod
    def is_cofibration(self, f) -> bool: ...

    @abstractmethod
    def is_fibration(self, f) -> bool: ...

    def is_weq(self, f) -> bool:
        return self.is_iso(f)

    def is_iso(self, f) -> bool:
        X, Y = self.source(f), self.target(f)
        ix, iy = self.identity(X), self.identity(Y)
        return any(self.compose(g, f) == ix and self.compose(f, g) == iy for g in self.hom(Y, X))

    def isomorphisms(self, X, Y) -> tuple:
        return tuple(f for f in self.hom(X, Y) if self.is_iso(f))

    def weq_maps(self, X, Y) -> tuple:
        if self.weq_is_iso:
            return self.isomorphisms(X, Y)
        return tuple(f for f in self.hom(X, Y) if self.is_weq(f))

    def initial_map(self, X):
        maps = self.hom(self.initial, X)
        if len(maps) != 1:
            raise StructuralError(f"expected exactly one map from the initial object to {X!r}")
        return maps[0]

    def is_initial(self, X) -> bool:
        return all(len(self.hom(X, Y)) == 1 for Y in self.window(None))

    def size(self, X) -> int:
        return 0

    # -- subobjects and subtraction ---------------------------------------
    def subobjects(self, X) -> tuple:
        """Cofibrations into ``X``; concrete instances give one per subobject."""
        return tuple(f for Y in self.window(None) for f in self.hom(Y, X) if self.is_cofibration(f))

    def fibration_subobjects(self, X) -> tuple:
        return tuple(f for Y in self.window(None) for f in self.hom(Y, X) if self.is_fibration(f))

    @abstractmethod
    def is_subtraction(self, c, f) -> bool:
        """Is ``source(c) -c-> X <-f- source(f)`` a certified subtraction sequence?"""

    @abstractmethod
    def subtraction(self, c):
        """The chosen fibration leg completing the cofibration ``c`` (or None)."""

    @abstractmethod
    def cosubtraction(self, f):
        """The chosen cofibration completing the fibration ``f`` (or None)."""

    def legs_for(self, c, bound=None) -> tuple:
        X = self.target(c)
        return tuple(
            f for Y in self.window(bound) for f in self.hom(Y, X) if self.is_fibration(f) and self.is_subtraction(c, f)
        )

    def colegs_for(self, f, bound=None) -> tuple:
        X = self.target(f)
        return tuple(
            c for Y in self.window(bound) for c in self.hom(Y, X) if self.is_cofibration(c) and self.is_subtraction(c, f)
        )

    # -- limits and colimits ----------------------------------------------
    @abstractmethod
    def pullback(self, f, g):
        """Chosen pullback of ``f: X -> W`` and ``g: Y -> W`` as ``(P, p1, p2)``; None if absent."""

    @abstractmethod
    def pushout(self, c1, c2):
        """Chosen pushout of ``c1: Z -> X`` and ``c2: Z -> Y`` as ``(P, j1, j2)``."""

    @abstractmethod
    def is_cartesian(self, p1, p2, f, g) -> bool:
        """Square ``P -p1-> X -f-> W``, ``P -p2-> Y -g-> W``."""

    @abstractmethod
    def is_cocartesian(self, c1, c2, j1, j2) -> bool:
        """Square ``Z -c1-> X -j1-> P``, ``Z -c2-> Y -j2-> P``."""

    @abstractmethod
    def factor(self, f, m):
        """The unique ``u`` with ``m ∘ u = f`` for a monomorphism ``m``, or None."""

    @abstractmethod
    def copair(self, po, a, b):
        """For a pushout ``po = (P, j1, j2)`` the map ``u: P -> T`` with ``u j1 = a``, ``u j2 = b``."""

    @abstractmethod
    def pair(self, pb, a, b):
        """For a pullback ``pb = (P, p1, p2)`` the map ``u: T -> P`` with ``p1 u = a``, ``p2 u = b``."""

    def coproduct(self, A, B):
        return self.pushout(self.initial_map(A), self.initial_map(B))

    # -- classification ----------------------------------------------------
    def iso_label(self, X):
        """Canonical label of the isomorphism class of ``X`` (brute force by default)."""
        cache = self.__dict__.setdefault("_iso_label_cache", {})
        if X in cache:
            return cache[X]
        for k, R in enumerate(self.window(None)):
            if self.isomorphisms(X, R):
                cache[X] = f"class{k}"
                return cache[X]
        cache[X] = None
        return None

    def describe(self, X) -> str:
        return repr(X)

    def is_tabulated(self) -> bool:
        return False

    #: cofibrations coincide with fibrations and subtraction with cosubtraction
    symmetric_legs: bool = False

    def cofibrations_between(self, Z, X) -> tuple:
        return tuple(f for f in self.hom(Z, X) if self.is_cofibration(f))

    def fibrations_between(self, Y, X) -> tuple:
        return tuple(f for f in self.hom(Y, X) if self.is_fibration(f))

    def representatives(self, bound) -> tuple:
        """First window object of each isomorphism class."""
        seen, out = set(), []
        for X in self.window(bound):
            lab = self.iso_label(X)
            if lab not in seen:
                seen.add(lab)
                out.append(X)
        return tuple(out)

    def pushout_in_bound(self, c1, c2, bound) -> bool:
        """Whether the pushout of this span belongs to the checked configurations."""
        return True

    def weq_key(self, X):
        """Invariant shared by weakly equivalent objects, used to prune searches."""
        return self.iso_label(X) if self.weq_is_iso else None

    def subobjects_by_source(self, X) -> dict:
        out: dict = {}
        for c in self.subobjects(X):
            out.setdefault(self.source(c), c)
        return out


# ---------------------------------------------------------------------------
# concrete realization


class ConcreteInstance(SWInstance):
    """Objects with finite carriers; morphisms are admissible functions.

    Cofibrations and fibrations are the admissible injections.  Subobjects,
    subtractions, pullbacks and pushouts are computed on carriers, with
    subclasses supplying how a carrier plus induced structure becomes an
    object (:meth:`make_sub`, :meth:`assemble`) and how to tag two carriers
    apart (:meth:`tag`).
    """

    def __init__(
        self,
        weq: Callable[[Morphism], bool] | None = None,
        weq_name: str = "iso",
        weq_key: Callable[[Any], Hashable] | None = None,
    ):
        self._weq = weq
        self._weq_key = weq_key
        self.weq_is_iso = weq is None
        self.weq_name = weq_name
        self._hom_cache: dict = {}
        self._sub_cache: dict = {}

    def iso_label(self, X):
        cache = self.__dict__.setdefault("_iso_label_cache", {})
        if X not in cache:
            cache[X] = self.compute_iso_label(X)
        return cache[X]

    def compute_iso_label(self, X):
        return SWInstance.iso_label(self, X)

    def weq_key(self, X):
        if self._weq_key is not None:
            return self._weq_key(X)
        return self.iso_label(X) if self.weq_is_iso else None

    # hooks -----------------------------------------------------------------
    @abstractmethod
    def carrier(self, X) -> frozenset: ...

    def admissible(self, mapping: dict, X, Y) -> bool:
        return True

    @abstractmethod
    def make_sub(self, X, elements: frozenset):
        """Canonical object on ``elements`` ⊆ carrier(X) with the induced structure."""

    def is_stable(self, X, elements: frozenset) -> bool:
        """Whether ``elements`` carries a subobject of ``X``."""
        return True

    @abstractmethod
    def assemble(self, elements: frozenset, parts: Sequence[tuple]):
        """Object on ``elements`` with structure induced from ``(object, map)`` parts."""

    def tag(self, X, Y):
        """Injective relabelings of carrier(X) and carrier(Y) with disjoint images."""
        return (lambda x: (0, x)), (lambda y: (1, y))

    def can_union(self, X, Y) -> bool:
        return True

    # structure -------------------------------------------------------------
    def size(self, X) -> int:
        return len(self.carrier(X))

    def source(self, f):
        return f.source

    def target(self, f):
        return f.target

    def compose(self, g: Morphism, f: Morphism) -> Morphism:
        if f.target != g.source:
            raise StructuralError("composition of non-composable morphisms")
        gt = g.table
        return Morphism(f.source, g.target, tuple((a, gt[b]) for a, b in f.pairs))

    def identity(self, X) -> Morphism:
        return Morphism.from_mapping(X, X, {x: x for x in self.carrier(X)})

    def morphism(self, X, Y, mapping) -> Morphism:
        m = Morphism.from_mapping(X, Y, mapping)
        cy = self.carrier(Y)
        if set(m.table) != set(self.carrier(X)) or not set(m.table.values()) <= cy:
            raise PreconditionError("mapping is not a function between the carriers")
        return m

    def hom(self, X, Y) -> tuple:
        key = (X, Y)
        hit = self._hom_cache.get(key)
        if hit is not None:
            return hit
        xs = sorted(self.carrier(X), key=canon)
        ys = sorted(self.carrier(Y), key=canon)
        out = []
        for values in itertools.product(ys, repeat=len(xs)):
            mapping = dict(zip(xs, values))
            if self.admissible(mapping, X, Y):
                out.append(Morphism(X, Y, tuple(zip(xs, values))))
        res = tuple(out)
        self._hom_cache[key] = res
        return res

    def isomorphisms(self, X, Y) -> tuple:
        xs = sorted(self.carrier(X), key=canon)
        ys = sorted(self.carrier(Y), key=canon)
        if len(xs) != len(ys):
            return ()
        out = []
        for perm in itertools.permutations(ys):
            mapping = dict(zip(xs, perm))
            if self.admissible(mapping, X, Y):
                out.append(Morphism(X, Y, tuple(zip(xs, perm))))
        return tuple(out)

    def injections(self, X, Y) -> tuple:
        xs = sorted(self.carrier(X), key=canon)
        ys = sorted(self.carrier(Y), key=canon)
        out = []
        for vals in itertools.permutations(ys, len(xs)):
            mapping = dict(zip(xs, vals))
            if self.admissible(mapping, X, Y):
                out.append(Morphism(X, Y, tuple(zip(xs, vals))))
        return tuple(out)

    def is_iso(self, f) -> bool:
        return f.is_injective() and len(self.carrier(f.target)) == len(f.pairs)

    def is_weq(self, f) -> bool:
        if self._weq is None:
            return self.is_iso(f)
        return bool(self._weq(f))

    def weq_maps(self, X, Y) -> tuple:
        if self._weq is None:
            return self.isomorphisms(X, Y)
        return tuple(f for f in self.hom(X, Y) if self._weq(f))

    symmetric_legs = True

    def is_cofibration(self, f) -> bool:
        return f.is_injective()

    def is_fibration(self, f) -> bool:
        return f.is_injective()

    def cofibrations_between(self, Z, X) -> tuple:
        return tuple(f for f in self.injections(Z, X) if self.is_cofibration(f))

    def fibrations_between(self, Y, X) -> tuple:
        return tuple(f for f in self.injections(Y, X) if self.is_fibration(f))

    def initial_map(self, X) -> Morphism:
        return Morphism(self.initial, X, ())

    def is_initial(self, X) -> bool:
        return not self.carrier(X)

    # subobjects --------------------------------------------------------------
    def inclusion(self, S, X) -> Morphism:
        return Morphism.from_mapping(S, X, {s: s for s in self.carrier(S)})

    def sub(self, X, elements) -> tuple:
        """``(S, S ↪ X)`` for a stable subset of the carrier."""
        elements = frozenset(elements)
        S = self.make_sub(X, elements)
        return S, self.inclusion(S, X)

    def subobjects(self, X) -> tuple:
        hit = self._sub_cache.get(X)
        if hit is not None:
            return hit
        elems = sorted(self.carrier(X), key=canon)
        out = []
        for r in range(len(elems) + 1):
            for combo in itertools.combinations(elems, r):
                s = frozenset(combo)
                if self.is_stable(X, s):
                    out.append(self.sub(X, s)[1])
        res = tuple(out)
        self._sub_cache[X] = res
        return res

    def fibration_subobjects(self, X) -> tuple:
        return self.subobjects(X)

    def is_subtraction(self, c, f) -> bool:
        if c.target != f.target or not (self.is_cofibration(c) and self.is_fibration(f)):
            return False
        ic, jf = c.image(), f.image()
        return not (ic & jf) and (ic | jf) == self.carrier(c.target)

    def subtraction(self, c) -> Morphism:
        X = c.target
        return self.sub(X, self.carrier(X) - c.image())[1]

    def cosubtraction(self, f) -> Morphism:
        X = f.target
        return self.sub(X, self.carrier(X) - f.image())[1]

    def legs_for(self, c, bound=None) -> tuple:
        X = c.target
        comp = sorted(self.carrier(X) - c.image(), key=canon)
        return self._onto(comp, X, bound)

    def colegs_for(self, f, bound=None) -> tuple:
        X = f.target
        comp = sorted(self.carrier(X) - f.image(), key=canon)
        return self._onto(comp, X, bound)

    def _onto(self, comp, X, bound) -> tuple:
        out = []
        for Y in self.window(bound):
            ys = sorted(self.carrier(Y), key=canon)
            if len(ys) != len(comp):
                continue
            for perm in itertools.permutations(comp):
                mapping = dict(zip(ys, perm))
                if self.admissible(mapping, Y, X):
                    out.append(Morphism(Y, X, tuple(zip(ys, perm))))
        return tuple(out)

    # products --------------------------------------------------------------
    def pair_element(self, X, Y, x, y):
        return (x, y)

    def product_object(self, X, Y, elements: frozenset):
        return self.assemble(elements, [])

    def product(self, X, Y):
        cx, cy = sorted_elems(frozenset(self.carrier(X))), sorted_elems(frozenset(self.carrier(Y)))
        return self.product_object(X, Y, frozenset(self.pair_element(X, Y, x, y) for x in cx for y in cy))

    def product_map(self, f, g):
        P, Q = self.product(f.source, g.source), self.product(f.target, g.target)
        mapping = {
            self.pair_element(f.source, g.source, x, y): self.pair_element(f.target, g.target, fx, gy)
            for x, fx in f.pairs
            for y, gy in g.pairs
        }
        return Morphism.from_mapping(P, Q, mapping)

    # limits ---------------------------------------------------------------
    def pullback(self, f, g):
        if f.target != g.target:
            raise StructuralError("pullback of maps with different targets")
        if f.is_injective():
            # P ⊆ source(g)
            imf = f.image()
            S, p2 = self.sub(g.source, frozenset(y for y, w in g.pairs if w in imf))
            inv = {w: x for x, w in f.pairs}
            p1 = Morphism.from_mapping(S, f.source, {y: inv[g(y)] for y in self.carrier(S)})
            return S, p1, p2
        if g.is_injective():
            P, q1, q2 = self.pullback(g, f)
            return P, q2, q1
        raise PreconditionError("pullbacks are only chosen along cofibrations and fibrations")

    def pushout(self, c1, c2):
        if c1.source != c2.source:
            raise StructuralError("pushout of maps with different sources")
        if not (c1.is_injective() and c2.is_injective()):
            raise PreconditionError("pushouts are only chosen for spans of cofibrations")
        X, Y = c1.target, c2.target
        cx, cy = self.carrier(X), self.carrier(Y)
        if (
            c1.is_identity_on_elements()
            and c2.is_identity_on_elements()
            and (cx & cy) == self.carrier(c1.source)
            and self.can_union(X, Y)
        ):
            fx = fy = lambda e: e  # noqa: E731
            elements = cx | cy
        else:
            fx, fy = self.tag(X, Y)
            back = {c2(z): c1(z) for z in self.carrier(c1.source)}
            elements = frozenset(fx(x) for x in cx) | frozenset(fy(y) for y in cy if y not in back)
        j1map = {x: fx(x) for x in cx}
        if fx is fy:
            j2map = {y: y for y in cy}
        else:
            j2map = {y: (fx(back[y]) if y in back else fy(y)) for y in cy}
        P = self.assemble(frozenset(elements), [(X, j1map), (Y, j2map)])
        return P, Morphism.from_mapping(X, P, j1map), Morphism.from_mapping(Y, P, j2map)

    def is_cartesian(self, p1, p2, f, g) -> bool:
        if not (p1.source == p2.source and p1.target == f.source and p2.target == g.source and f.target == g.target):
            return False
        P = p1.source
        if any(f(p1(x)) != g(p2(x)) for x in self.carrier(P)):
            return False
        fiber = {(x, y) for x in self.carrier(f.source) for y in self.carrier(g.source) if f(x) == g(y)}
        induced = [(p1(x), p2(x)) for x in self.carrier(P)]
        return len(set(induced)) == len(induced) and set(induced) == fiber

    def is_cocartesian(self, c1, c2, j1, j2) -> bool:
        if not (c1.source == c2.source and j1.source == c1.target and j2.source == c2.target and j1.target == j2.target):
            return False
        Z = c1.source
        if any(j1(c1(z)) != j2(c2(z)) for z in self.carrier(Z)):
            return False
        # quotient of X ⊔ Y by c1(z) ~ c2(z)
        parent: dict = {}

        def find(a):
            while parent.get(a, a) != a:
                a = parent[a]
            return a

        for z in self.carrier(Z):
            ra, rb = find((0, c1(z))), find((1, c2(z)))
            if ra != rb:
                parent[ra] = rb
        classes: dict = {}
        for x in self.carrier(c1.target):
            classes.setdefault(find((0, x)), set()).add(j1(x))
        for y in self.carrier(c2.target):
            classes.setdefault(find((1, y)), set()).add(j2(y))
        images = []
        for vals in classes.values():
            if len(vals) != 1:
                return False
            images.extend(vals)
        return len(set(images)) == len(images) and set(images) == set(self.carrier(j1.target))

    def factor(self, f, m):
        if f.target != m.target:
            return None
        inv = {w: x for x, w in m.pairs}
        if not m.is_injective():
            return None
        try:
            mapping = {a: inv[b] for a, b in f.pairs}
        except KeyError:
            return None
        if not self.admissible(mapping, f.source, m.source):
            return None
        return Morphism.from_mapping(f.source, m.source, mapping)

    def copair(self, po, a, b):
        P, j1, j2 = po
        mapping = {}
        for x, p in j1.pairs:
            mapping[p] = a(x)
        for y, p in j2.pairs:
            if p in mapping and mapping[p] != b(y):
                raise PreconditionError("cocone does not agree on the glued part")
            mapping[p] = b(y)
        return Morphism.from_mapping(P, a.target, mapping)

    def pair(self, pb, a, b):
        P, p1, p2 = pb
        index = {(p1(x), p2(x)): x for x in self.carrier(P)}
        mapping = {}
        for t in self.carrier(a.source):
            key = (a(t), b(t))
            if key not in index:
                raise PreconditionError("cone does not factor through the pullback")
            mapping[t] = index[key]
        return Morphism.from_mapping(a.source, P, mapping)


# ---------------------------------------------------------------------------
# tabulated realization

SCHEMA_VERSION = 1


class TabulatedInstance(SWInstance):
    """Instance given by explicit finite tables.

    Morphisms are opaque string identifiers.  Universal properties are
    verified by brute force over the whole table, which makes this the
    independent reference for the element-wise checks of concrete instances.
    """

    def __init__(
        self,
        objects: Sequence[str],
        morphisms: dict,
        composition: dict,
        identities: dict,
        initial: str,
        cofibrations: Iterable[str],
        fibrations: Iterable[str],
        weak_equivalences: Iterable[str] | None = None,
        subtraction_triples: Iterable[tuple] = (),
        pushout_choice: dict | None = None,
        pullback_choice: dict | None = None,
        sizes: dict | None = None,
        name: str = "tabulated",
    ):
        self.name = name
        self._objects = tuple(objects)
        self.morphisms = dict(morphisms)
        self.composition = dict(composition)
        self.identities = dict(identities)
        self._initial = initial
        self.cofibrations = frozenset(cofibrations)
        self.fibrations = frozenset(fibrations)
        self.weak_equivalences = None if weak_equivalences is None else frozenset(weak_equivalences)
        self.weq_is_iso = weak_equivalences is None
        self.triples = frozenset(tuple(t) for t in subtraction_triples)
        self.pushout_choice = dict(pushout_choice or {})
        self.pullback_choice = dict(pullback_choice or {})
        self.sizes = dict(sizes or {})
        self._validate()
        self._hom: dict = {}
        for m in sorted(self.morphisms):
            s, t = self.morphisms[m]
            self._hom.setdefault((s, t), []).append(m)

    def _validate(self):
        objs = set(self._objects)
        if self._initial not in objs:
            raise StructuralError(f"dangling object identifier {self._initial!r} (initial)")
        for m, (s, t) in self.morphisms.items():
            for o in (s, t):
                if o not in objs:
                    raise StructuralError(f"dangling object identifier {o!r} in morphism {m!r}")
        known = set(self.morphisms)
        for (g, f), h in self.composition.items():
            for m in (g, f, h):
                if m not in known:
                    raise StructuralError(f"dangling morphism identifier {m!r} in composition table")
        for o, i in self.identities.items():
            if o not in objs or i not in known:
                raise StructuralError(f"dangling identifier in identity entry {o!r} -> {i!r}")
        for o in objs:
            if o not in self.identities:
                raise StructuralError(f"object {o!r} has no identity morphism")
        pools = [self.cofibrations, self.fibrations, self.weak_equivalences or ()]
        for pool in pools:
            for m in pool:
                if m not in known:
                    raise StructuralError(f"dangling morphism identifier {m!r} in predicate table")
        for c, f in self.triples:
            for m in (c, f):
                if m not in known:
                    raise StructuralError(f"dangling morphism identifier {m!r} in subtraction triple")
        for table in (self.pushout_choice, self.pullback_choice):
            for k, (P, a, b) in table.items():
                for m in (*k, a, b):
                    if m not in known:
                        raise StructuralError(f"dangling morphism identifier {m!r} in limit choice")
                if P not in objs:
                    raise StructuralError(f"dangling object identifier {P!r} in limit choice")

    def is_tabulated(self) -> bool:
        return True

    @property
    def initial(self):
        return self._initial

    def window(self, bound) -> tuple:
        if bound is None:
            return self._objects
        return tuple(o for o in self._objects if self.sizes.get(o, 0) <= bound)

    def size(self, X) -> int:
        return self.sizes.get(X, 0)

    def hom(self, X, Y) -> tuple:
        return tuple(self._hom.get((X, Y), ()))

    def source(self, f):
        return self.morphisms[f][0]

    def target(self, f):
        return self.morphisms[f][1]

    def compose(self, g, f):
        if self.target(f) != self.source(g):
            raise StructuralError(f"{g!r} ∘ {f!r} is not composable")
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise StructuralError(f"composition table has no entry for {g!r} ∘ {f!r}") from None

    def identity(self, X):
        return self.identities[X]

    def is_cofibration(self, f) -> bool:
        return f in self.cofibrations

    def is_fibration(self, f) -> bool:
        return f in self.fibrations

    def is_weq(self, f) -> bool:
        if self.weak_equivalences is None:
            return self.is_iso(f)
        return f in self.weak_equivalences

    def _is_mono(self, m) -> bool:
        X = self.source(m)
        for T in self._objects:
            seen = set()
            for a in self.hom(T, X):
                v = self.compose(m, a)
                if v in seen:
                    return False
                seen.add(v)
        return True

    def is_subtraction(self, c, f) -> bool:
        return (c, f) in self.triples

    def subtraction(self, c):
        for cc, f in sorted(self.triples):
            if cc == c:
                return f
        return None

    def cosubtraction(self, f):
        for c, ff in sorted(self.triples):
            if ff == f:
                return c
        return None

    def pullback(self, f, g):
        return self.pullback_choice.get((f, g))

    def pushout(self, c1, c2):
        try:
            return self.pushout_choice[(c1, c2)]
        except KeyError:
            raise PushoutTableIncomplete((c1, c2)) from None

    def is_cartesian(self, p1, p2, f, g) -> bool:
        P = self.source(p1)
        if self.compose(f, p1) != self.compose(g, p2):
            return False
        X, Y = self.source(f), self.source(g)
        for T in self._objects:
            for a in self.hom(T, X):
                fa = self.compose(f, a)
                for b in self.hom(T, Y):
                    if fa != self.compose(g, b):
                        continue
                    n = sum(1 for u in self.hom(T, P) if self.compose(p1, u) == a and self.compose(p2, u) == b)
                    if n != 1:
                        return False
        return True

    def is_cocartesian(self, c1, c2, j1, j2) -> bool:
        P = self.target(j1)
        if self.compose(j1, c1) != self.compose(j2, c2):
            return False
        X, Y = self.target(c1), self.target(c2)
        for T in self._objects:
            for a in self.hom(X, T):
                ac = self.compose(a, c1)
                for b in self.hom(Y, T):
                    if ac != self.compose(b, c2):
                        continue
                    n = sum(1 for u in self.hom(P, T) if self.compose(u, j1) == a and self.compose(u, j2) == b)
                    if n != 1:
                        return False
        return True

    def factor(self, f, m):
        hits = [u for u in self.hom(self.source(f), self.source(m)) if self.compose(m, u) == f]
        return hits[0] if len(hits) == 1 else None

    def copair(self, po, a, b):
        P, j1, j2 = po
        hits = [u for u in self.hom(P, self.target(a)) if self.compose(u, j1) == a and self.compose(u, j2) == b]
        if len(hits) != 1:
            raise PreconditionError("cocone does not factor uniquely")
        return hits[0]

    def pair(self, pb, a, b):
        P, p1, p2 = pb
        hits = [u for u in self.hom(self.source(a), P) if self.compose(p1, u) == a and self.compose(p2, u) == b]
        if len(hits) != 1:
            raise PreconditionError("cone does not factor uniquely")
        return hits[0]

    def pushout_in_bound(self, c1, c2, bound) -> bool:
        if bound is None:
            # the table is closed up to its largest object
            if not self.sizes:
                return True
            bound = max(self.sizes.values())
        return self.size(self.target(c1)) + self.size(self.target(c2)) - self.size(self.source(c1)) <= bound

    # serialization ---------------------------------------------------------
    def to_json(self) -> dict:
        morphs = sorted(self.morphisms)
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "tabulated-sw-instance",
            "name": self.name,
            "objects": list(self._objects),
            "sizes": {o: self.sizes.get(o, 0) for o in self._objects},
            "initial": self._initial,
            "morphisms": [[m, *self.morphisms[m]] for m in morphs],
            "identities": [[o, self.identities[o]] for o in self._objects],
            "composition": sorted([g, f, h] for (g, f), h in self.composition.items()),
            "cofibrations": "".join("1" if m in self.cofibrations else "0" for m in morphs),
            "fibrations": "".join("1" if m in self.fibrations else "0" for m in morphs),
            "weak_equivalences": None
            if self.weak_equivalences is None
            else "".join("1" if m in self.weak_equivalences else "0" for m in morphs),
            "subtraction_triples": sorted(list(t) for t in self.triples),
            "pushout_choice": sorted([c1, c2, P, a, b] for (c1, c2), (P, a, b) in self.pushout_choice.items()),
            "pullback_choice": sorted([f, g, P, a, b] for (f, g), (P, a, b) in self.pullback_choice.items()),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TabulatedInstance":
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise StructuralError(f"unsupported schema_version {doc.get('schema_version')!r}")
        morphs = sorted(m for m, _, _ in doc["morphisms"])

        def bits(s):
            if s is None:
                return None
            if len(s) != len(morphs):
                raise StructuralError("predicate bitset length does not match morphism count")
            return [m for m, b in zip(morphs, s) if b == "1"]

        return cls(
            objects=doc["objects"],
            morphisms={m: (s, t) for m, s, t in doc["morphisms"]},
            composition={(g, f): h for g, f, h in doc["composition"]},
            identities={o: i for o, i in doc["identities"]},
            initial=doc["initial"],
            cofibrations=bits(doc["cofibrations"]),
            fibrations=bits(doc["fibrations"]),
            weak_equivalences=bits(doc.get("weak_equivalences")),
            subtraction_triples=[tuple(t) for t in doc["subtraction_triples"]],
            pushout_choice={(c1, c2): (P, a, b) for c1, c2, P, a, b in doc["pushout_choice"]},
            pullback_choice={(f, g): (P, a, b) for f, g, P, a, b in doc["pullback_choice"]},
            sizes=doc.get("sizes"),
            name=doc.get("name", "tabulated"),
        )

    @classmethod
    def from_instance(cls, inst: ConcreteInstance, bound, name: str | None = None) -> "TabulatedInstance":
        """Tabulate the window of a concrete instance.

        Pushout and pullback choices outside the window are transported along
        an isomorphism onto the window object of the same class.
        """
        objs = list(inst.window(bound))
        oid = {o: f"o{k}" for k, o in enumerate(objs)}
        mid: dict = {}
        morphisms = {}
        for X in objs:
            for Y in objs:
                for f in inst.hom(X, Y):
                    mid[f] = f"m{len(mid)}"
                    morphisms[mid[f]] = (oid[X], oid[Y])
        composition = {}
        for f, fi in mid.items():
            for g in (g for g in mid if g.source == f.target):
                composition[(mid[g], fi)] = mid[inst.compose(g, f)]
        identities = {oid[X]: mid[inst.identity(X)] for X in objs}
        cof = [mid[f] for f in mid if inst.is_cofibration(f)]
        fib = [mid[f] for f in mid if inst.is_fibration(f)]
        weq = None if inst.weq_is_iso else [mid[f] for f in mid if inst.is_weq(f)]
        triples = []
        by_target: dict = {}
        for f in mid:
            by_target.setdefault(f.target, []).append(f)
        for X in objs:
            into = by_target.get(X, [])
            for c in into:
                if not inst.is_cofibration(c):
                    continue
                for f in into:
                    if inst.is_subtraction(c, f):
                        triples.append((mid[c], mid[f]))
        by_label: dict = {}
        for o in objs:
            by_label.setdefault(inst.iso_label(o), o)

        def land(P, a, b):
            # move a cone or cocone outside the window onto an isomorphic window object
            if P in oid:
                return oid[P], mid.get(a), mid.get(b)
            R = by_label.get(inst.iso_label(P))
            isos = inst.isomorphisms(P, R) if R is not None else ()
            if not isos:
                return None, None, None
            phi = isos[0]
            if inst.source(a) == P:
                psi = inst.isomorphisms(R, P)
                psi = next(u for u in psi if inst.compose(phi, u) == inst.identity(R))
                return oid[R], mid.get(inst.compose(a, psi)), mid.get(inst.compose(b, psi))
            return oid[R], mid.get(inst.compose(phi, a)), mid.get(inst.compose(phi, b))

        pushouts = {}
        pullbacks = {}
        for X in objs:
            into = by_target.get(X, [])
            for f in into:
                for g in into:
                    if f.is_injective() or g.is_injective():
                        P, a, b = land(*inst.pullback(f, g))
                        if None not in (P, a, b):
                            pullbacks[(mid[f], mid[g])] = (P, a, b)
        by_source: dict = {}
        for f in mid:
            if inst.is_cofibration(f):
                by_source.setdefault(f.source, []).append(f)
        for Z, outs in by_source.items():
            for c1 in outs:
                for c2 in outs:
                    P, a, b = land(*inst.pushout(c1, c2))
                    if None not in (P, a, b):
                        pushouts[(mid[c1], mid[c2])] = (P, a, b)
        return cls(
            objects=[oid[o] for o in objs],
            morphisms=morphisms,
            composition=composition,
            identities=identities,
            initial=oid[inst.initial],
            cofibrations=cof,
            fibrations=fib,
            weak_equivalences=weq,
            subtraction_triples=triples,
            pushout_choice=pushouts,
            pullback_choice=pullbacks,
            sizes={oid[o]: inst.size(o) for o in objs},
            name=name or f"tabulated({inst.name})",
        )


# ---------------------------------------------------------------------------
# grids


@dataclass
class SubtractionGrid:
    """3x3 diagram extending a cartesian square of cofibrations (or fibrations).

    Slots are keyed by ``(row, col)``::

        W    -> X    <- X-W
        Z    -> Y    <- Y-Z
        Z-W  -> Y-X  <- corner

    ``arrows`` holds the named maps; ``problems`` lists rows, columns or
    uniqueness conditions that failed while building it.
    """

    slots: dict
    arrows: dict
    kind: str = "cof"
    problems: list = field(default_factory=list)

    @property
    def corner(self):
        return self.slots[(2, 2)]

    def rows(self):
        a = self.arrows
        return [("row0", a["W>X"], a["X-W>X"]), ("row1", a["Z>Y"], a["Y-Z>Y"]), ("row2", a["Z-W>Y-X"], a["c>Y-X"])]

    def columns(self):
        a = self.arrows
        return [("col0", a["W>Z"], a["Z-W>Z"]), ("col1", a["X>Y"], a["Y-X>Y"]), ("col2", a["X-W>Y-Z"], a["c>Y-Z"])]


def _unique_filler(inst, S, T, cond):
    hits = [u for u in inst.hom(S, T) if cond(u)]
    return hits[0] if len(hits) == 1 else None, len(hits)


def extend_to_grid(inst: SWInstance, square, kind: str = "cof") -> SubtractionGrid:
    """Complete a cartesian square ``(W->X, W->Z, X->Y, Z->Y)`` to the full 3x3 grid."""
    wx, wz, xy, zy = square
    is_kind = inst.is_cofibration if kind == "cof" else inst.is_fibration
    leg_of = inst.subtraction if kind == "cof" else inst.cosubtraction
    if kind == "cof":
        is_pair = inst.is_subtraction
    else:
        is_pair = lambda inc, leg: inst.is_subtraction(leg, inc)  # noqa: E731
    if not all(is_kind(m) for m in square):
        raise PreconditionError("square arrows must all be of the requested kind")
    if inst.compose(xy, wx) != inst.compose(zy, wz) or not inst.is_cartesian(wx, wz, xy, zy):
        raise PreconditionError("input square is not cartesian")
    W, X, Z, Y = inst.source(wx), inst.target(wx), inst.target(wz), inst.target(xy)
    l_xw, l_zw, l_yx, l_yz = leg_of(wx), leg_of(wz), leg_of(xy), leg_of(zy)
    if None in (l_xw, l_zw, l_yx, l_yz):
        raise PreconditionError("square has an arrow without a subtraction leg")
    XW, ZW, YX, YZ = (inst.source(m) for m in (l_xw, l_zw, l_yx, l_yz))
    problems = []
    right_target = inst.compose(xy, l_xw)
    u_r, n_r = _unique_filler(inst, XW, YZ, lambda u: inst.compose(l_yz, u) == right_target)
    bottom_target = inst.compose(zy, l_zw)
    u_b, n_b = _unique_filler(inst, ZW, YX, lambda u: inst.compose(l_yx, u) == bottom_target)
    if u_r is None:
        problems.append(f"right arrow X-W -> Y-Z has {n_r} candidates")
    if u_b is None:
        problems.append(f"bottom arrow Z-W -> Y-X has {n_b} candidates")
    corner = e1 = e2 = None
    if u_r is not None and u_b is not None:
        if not (is_kind(u_r) and is_kind(u_b)):
            problems.append("induced arrows between complements are not of the requested kind")
        else:
            e1 = leg_of(u_r)
            if e1 is None:
                problems.append("right arrow has no subtraction leg")
            else:
                corner = inst.source(e1)
                via = inst.compose(l_yz, e1)
                e2, n2 = _unique_filler(inst, corner, YX, lambda u: inst.compose(l_yx, u) == via)
                if e2 is None:
                    problems.append(f"corner map to Y-X has {n2} candidates")
    slots = {(0, 0): W, (0, 1): X, (0, 2): XW, (1, 0): Z, (1, 1): Y, (1, 2): YZ, (2, 0): ZW, (2, 1): YX, (2, 2): corner}
    arrows = {
        "W>X": wx, "X-W>X": l_xw, "Z>Y": zy, "Y-Z>Y": l_yz, "Z-W>Y-X": u_b, "c>Y-X": e2,
        "W>Z": wz, "Z-W>Z": l_zw, "X>Y": xy, "Y-X>Y": l_yx, "X-W>Y-Z": u_r, "c>Y-Z": e1,
    }
    grid = SubtractionGrid(slots, arrows, kind, problems)
    if e1 is not None and e2 is not None:
        for label, inc, leg in grid.rows() + grid.columns():
            if not is_pair(inc, leg):
                problems.append(f"{label} is not a subtraction sequence")
        if not inst.is_cartesian(e1, e2, l_yz, l_yx):
            problems.append("bottom-right square is not cartesian")
    return grid


# ---------------------------------------------------------------------------
# checkers


def _attempt(fn, *args):
    """Induced map, or None when the (possibly broken) chosen cone does not factor it."""
    try:
        return fn(*args)
    except PreconditionError:
        return None


def _all_cofibrations(inst, objs):
    for X in objs:
        for Z in objs:
            yield from inst.cofibrations_between(Z, X)


def _all_fibrations(inst, objs):
    for X in objs:
        for Y in objs:
            yield from inst.fibrations_between(Y, X)


def _leg_uniqueness(inst, rep, axiom, c, chosen, legs, dual=False):
    for f2 in legs:
        isos = [
            phi for phi in inst.isomorphisms(inst.source(f2), inst.source(chosen)) if inst.compose(chosen, phi) == f2
        ]
        what = "cofibration" if dual else "fibration"
        rep.expect(
            len(isos) == 1,
            axiom,
            f"{what} legs of the same subtraction are related by {len(isos)} commuting isomorphisms",
            {"arrow": c, "chosen": chosen, "other": f2},
        )


def check_subtraction_axioms(inst: SWInstance, bound) -> CheckReport:
    """Exhaustively check the category-with-subtraction axioms on ``inst.window(bound)``."""
    rep = CheckReport(f"subtraction axioms: {inst.name}")
    objs = inst.window(bound)
    objset = set(objs)

    # structure: units, associativity, closure of the two subcategories
    for X in objs:
        for Y in objs:
            for f in inst.hom(X, Y):
                rep.expect(
                    inst.compose(inst.identity(Y), f) == f and inst.compose(f, inst.identity(X)) == f,
                    "structure",
                    "identity is not a two-sided unit",
                    f,
                )
    if inst.is_tabulated():
        for X, Y, Z, T in itertools.product(objs, repeat=4):
            for f in inst.hom(X, Y):
                for g in inst.hom(Y, Z):
                    gf = inst.compose(g, f)
                    for h in inst.hom(Z, T):
                        rep.expect(
                            inst.compose(h, gf) == inst.compose(inst.compose(h, g), f),
                            "structure",
                            "composition is not associative",
                            (h, g, f),
                        )
    for X in objs:
        for c in inst.subobjects(X):
            for Y in objs:
                for d in inst.cofibrations_between(X, Y):
                    rep.expect(inst.is_cofibration(inst.compose(d, c)), "structure", "cofibrations do not compose", (d, c))
        if not inst.symmetric_legs:
            for f in inst.fibration_subobjects(X):
                for Y in objs:
                    for g in inst.fibrations_between(X, Y):
                        rep.expect(inst.is_fibration(inst.compose(g, f)), "structure", "fibrations do not compose", (g, f))

    # 1: initial object
    if rep.expect(inst.initial in objset, "1", "initial object is outside the window", inst.initial):
        for X in objs:
            n = len(inst.hom(inst.initial, X))
            rep.expect(n == 1, "1", f"initial object has {n} maps to an object", X)

    # 2: isomorphisms are cofibrations and fibrations
    for X in objs:
        for Y in objs:
            for phi in inst.isomorphisms(X, Y):
                rep.expect(inst.is_cofibration(phi), "2", "isomorphism is not a cofibration", phi)
                rep.expect(inst.is_fibration(phi), "2", "isomorphism is not a fibration", phi)

    # 3: stability under pullback
    kinds = [("cof", inst.subobjects, inst.is_cofibration)]
    if not inst.symmetric_legs:
        kinds.append(("fib", inst.fibration_subobjects, inst.is_fibration))
    for label, subs, is_kind in kinds:
        for X in objs:
            for c in subs(X):
                for W in objs:
                    for g in inst.hom(W, X):
                        pb = inst.pullback(c, g)
                        if not rep.expect(pb is not None, "3", f"no chosen pullback of a {label}", (c, g)):
                            continue
                        P, p1, p2 = pb
                        rep.expect(inst.is_cartesian(p1, p2, c, g), "3", f"chosen pullback of a {label} is not cartesian", (c, g))
                        rep.expect(is_kind(p2), "3", f"pullback of a {label} is not a {label}", (c, g))

    # 4a: coproducts
    for A in objs:
        for B in objs:
            c1, c2 = inst.initial_map(A), inst.initial_map(B)
            if not inst.pushout_in_bound(c1, c2, bound) and inst.is_tabulated():
                continue
            P, j1, j2 = inst.coproduct(A, B)
            rep.expect(inst.is_subtraction(j1, j2), "4a", "coproduct injections do not form a subtraction", (A, B))

    # 4b: existence and uniqueness of subtraction legs
    for c in _all_cofibrations(inst, objs):
        f = inst.subtraction(c)
        if not rep.expect(
            f is not None and inst.is_fibration(f) and inst.is_subtraction(c, f),
            "4b",
            "cofibration has no subtraction leg",
            c,
        ):
            continue
        _leg_uniqueness(inst, rep, "4b", c, f, inst.legs_for(c, bound))
    if not inst.symmetric_legs:
        for f in _all_fibrations(inst, objs):
            c = inst.cosubtraction(f)
            if not rep.expect(
                c is not None and inst.is_cofibration(c) and inst.is_subtraction(c, f),
                "4b",
                "fibration has no subtraction leg",
                f,
            ):
                continue
            _leg_uniqueness(inst, rep, "4b", f, c, inst.colegs_for(f, bound), dual=True)

    # 4c: 3x3 grids from cartesian squares
    for label, subs, _ in kinds:
        for Y in objs:
            ss = subs(Y)
            for a in ss:
                for b in ss:
                    pb = inst.pullback(a, b)
                    if pb is None:
                        rep.expect(False, "4c", "no chosen pullback of two subobjects", (a, b))
                        continue
                    W, wx, wz = pb
                    try:
                        grid = extend_to_grid(inst, (wx, wz, a, b), kind=label)
                    except PreconditionError as e:
                        rep.expect(False, "4c", str(e), (a, b))
                        continue
                    rep.tick("4c")
                    for p in grid.problems:
                        rep.fail("4c", p, (a, b))

    # 4d: base change of subtraction sequences
    for X in objs:
        for c in inst.subobjects(X):
            f = inst.subtraction(c)
            if f is None:
                continue
            for W in objs:
                for g in inst.hom(W, X):
                    pc, pf = inst.pullback(c, g), inst.pullback(f, g)
                    if pc is None or pf is None:
                        rep.expect(False, "4d", "missing chosen pullback", (c, g))
                        continue
                    rep.expect(inst.is_subtraction(pc[2], pf[2]), "4d", "base change does not preserve a subtraction", (c, g))
    if inst.symmetric_legs:
        rep.notes.append("cofibrations coincide with fibrations; dual checks are covered by the cofibration checks")
    return rep.finalize()


def iter_spans(inst: SWInstance, objs, outer=None):
    """Spans of cofibrations ``X <- Z -> Y`` with ``Z`` a chosen subobject of ``X``.

    ``X`` runs over ``outer`` (default ``objs``).  Every span in the window is
    isomorphic to one of these once ``outer`` meets every isomorphism class.
    """
    for X in objs if outer is None else outer:
        for c1 in inst.subobjects(X):
            Z = inst.source(c1)
            for Y in objs:
                for c2 in inst.cofibrations_between(Z, Y):
                    yield c1, c2


def check_subtractive_axioms(inst: SWInstance, bound) -> CheckReport:
    """Pushouts along cofibrations, pushout products and the subtraction-vs-pushout grid."""
    rep = CheckReport(f"subtractive axioms: {inst.name}")
    objs = inst.window(bound)
    reps = inst.representatives(bound)
    spans = [s for s in iter_spans(inst, objs, reps) if inst.pushout_in_bound(s[0], s[1], bound)]
    base_kinds = [inst.subobjects] if inst.symmetric_legs else [inst.subobjects, inst.fibration_subobjects]

    # P1: pushouts exist, are cartesian, and are stable under base change
    pushouts = {}
    for c1, c2 in spans:
        P, j1, j2 = po = inst.pushout(c1, c2)
        pushouts[(c1, c2)] = po
        w = (c1, c2)
        rep.expect(inst.is_cofibration(j1) and inst.is_cofibration(j2), "P1", "pushout legs are not cofibrations", w)
        rep.expect(inst.is_cocartesian(c1, c2, j1, j2), "P1", "chosen pushout is not cocartesian", w)
        rep.expect(inst.is_cartesian(c1, c2, j1, j2), "P1", "cocartesian diagrams of cofibrations are not cartesian", w)
        j0 = inst.compose(j1, c1)
        for subs in base_kinds:
            for s in subs(P):
                qx, qy, qz = inst.pullback(s, j1), inst.pullback(s, j2), inst.pullback(s, j0)
                if None in (qx, qy, qz):
                    rep.expect(False, "P1", "missing pullback during base change", (c1, c2, s))
                    continue
                zx = _attempt(inst.pair, qx, qz[1], inst.compose(c1, qz[2]))
                zy = _attempt(inst.pair, qy, qz[1], inst.compose(c2, qz[2]))
                rep.expect(
                    zx is not None and zy is not None and inst.is_cocartesian(zx, zy, qx[1], qy[1]),
                    "P1",
                    "pushout is not preserved by base change",
                    (c1, c2, s),
                )

    # P2: pushout products of cartesian squares
    for Y in reps:
        subs = inst.subobjects(Y)
        for a in subs:
            for b in subs:
                W, wx, wz = inst.pullback(a, b)
                if not inst.pushout_in_bound(wx, wz, bound):
                    continue
                po = inst.pushout(wx, wz)
                u = _attempt(inst.copair, po, a, b)
                rep.expect(u is not None and inst.is_cofibration(u), "P2", "pushout-product map is not a cofibration", (a, b))

    # P3: subtraction commutes with pushouts
    for (c1, c2), (P, j1, j2) in pushouts.items():
        X, Y = inst.target(c1), inst.target(c2)
        for a in inst.subobjects(X):
            pa = inst.pullback(a, c1)
            la = inst.subtraction(a)
            for b in inst.subobjects(Y):
                pb = inst.pullback(b, c2)
                phi = inst.factor(pa[2], pb[2])
                if phi is None or not inst.is_iso(phi):
                    continue
                _check_pushout_grid(inst, rep, bound, (c1, c2), (P, j1, j2), a, b, pa, pb, phi, la)
    return rep.finalize()


def _check_pushout_grid(inst, rep, bound, span, po, a, b, pa, pb, phi, la):
    c1, c2 = span
    P, j1, j2 = po
    lb = inst.subtraction(b)
    top1, top2 = pa[1], inst.compose(pb[1], phi)
    lw = inst.subtraction(pa[2])
    if None in (la, lb, lw):
        rep.expect(False, "P3", "missing subtraction leg", (c1, c2, a, b))
        return
    bot1 = inst.factor(inst.compose(c1, lw), la)
    bot2 = inst.factor(inst.compose(c2, lw), lb)
    w = (c1, c2, a, b)
    if not rep.expect(
        bot1 is not None and bot2 is not None and inst.is_cofibration(bot1) and inst.is_cofibration(bot2),
        "P3",
        "complements do not form a span of cofibrations",
        w,
    ):
        return
    if not (inst.pushout_in_bound(top1, top2, bound) and inst.pushout_in_bound(bot1, bot2, bound)):
        return
    top = inst.pushout(top1, top2)
    bot = inst.pushout(bot1, bot2)
    m1 = _attempt(inst.copair, top, inst.compose(j1, a), inst.compose(j2, b))
    m2 = _attempt(inst.copair, bot, inst.compose(j1, la), inst.compose(j2, lb))
    rep.expect(
        m1 is not None
        and m2 is not None
        and inst.is_cofibration(m1) and inst.is_fibration(m2) and inst.is_subtraction(m1, m2),
        "P3",
        "pushouts of a subtraction grid do not form a subtraction",
        w,
    )


def check_sw_axioms(inst: SWInstance, bound) -> CheckReport:
    """Weak-equivalence axioms: isomorphisms, gluing, and compatibility with subtraction."""
    rep = CheckReport(f"SW axioms: {inst.name}")
    objs = inst.window(bound)
    if inst.weq_is_iso:
        rep.notes.append("weak equivalences are the isomorphisms")

    for X in objs:
        for Y in objs:
            for phi in inst.isomorphisms(X, Y):
                rep.expect(inst.is_weq(phi), "SW1", "isomorphism is not a weak equivalence", phi)

    groups: dict = {}
    keys = {X: inst.weq_key(X) for X in objs}
    for X in objs:
        groups.setdefault(keys[X], []).append(X)
    by_source = {Y: inst.subobjects_by_source(Y) for Y in objs}
    containing: dict = {}
    for Y in objs:
        for Z, c in by_source[Y].items():
            containing.setdefault(Z, []).append((Y, c))

    reps = inst.representatives(bound)

    # SW2: gluing
    for X in reps:
        for c1 in inst.subobjects(X):
            Z = inst.source(c1)
            for Y, c2 in containing.get(Z, ()):
                if not inst.pushout_in_bound(c1, c2, bound):
                    continue
                po = inst.pushout(c1, c2)
                for X2 in groups.get(keys[X], ()):
                    for wx in inst.weq_maps(X, X2):
                        wxc = inst.compose(wx, c1)
                        for d1 in inst.subobjects(X2):
                            wz = inst.factor(wxc, d1)
                            if wz is None or not inst.is_weq(wz):
                                continue
                            Z2 = inst.source(d1)
                            _glue(inst, rep, bound, keys, containing, (c1, c2), po, wx, wz, d1, Y, Z2)

    # SW3: subtraction is respected
    for Y in reps:
        for c in inst.subobjects(Y):
            leg = inst.subtraction(c)
            for Y2 in groups.get(keys[Y], ()):
                for wy in inst.weq_maps(Y, Y2):
                    wyc = inst.compose(wy, c)
                    for c2 in inst.subobjects(Y2):
                        wx = inst.factor(wyc, c2)
                        if wx is None or not inst.is_weq(wx):
                            continue
                        leg2 = inst.subtraction(c2)
                        if leg is None or leg2 is None:
                            continue
                        rep.expect(
                            bool(inst.weq_maps(inst.source(leg), inst.source(leg2))),
                            "SW3",
                            "no weak equivalence between complements",
                            (c, wy, c2),
                        )
    return rep.finalize()


def _glue(inst, rep, bound, keys, containing, span, po, wx, wz, d1, Y, Z2):
    c1, c2 = span
    for Y2, d2 in containing.get(Z2, ()):
        if keys[Y2] != keys[Y]:
            continue
        if not inst.pushout_in_bound(d1, d2, bound):
            continue
        lhs = inst.compose(d2, wz)
        po2 = None
        for wy in inst.weq_maps(Y, Y2):
            if inst.compose(wy, c2) != lhs:
                continue
            if po2 is None:
                po2 = inst.pushout(d1, d2)
            u = _attempt(inst.copair, po, inst.compose(po2[1], wx), inst.compose(po2[2], wy))
            rep.expect(u is not None and inst.is_weq(u), "SW2", "gluing of weak equivalences is not a weak equivalence", (c1, c2, wx, wy))


# ---------------------------------------------------------------------------
# subtraction sequences as objects


@dataclass(frozen=True)
class SeqObj:
    """A subtraction sequence ``Z -cof-> X <-fib- Y`` used as a single object."""

    cof: Any
    fib: Any

    @property
    def Z(self):
        return self.cof.source

    @property
    def X(self):
        return self.cof.target

    @property
    def Y(self):
        return self.fib.source

    def sort_key(self):
        return (canon(self.cof), canon(self.fib))

    def to_json(self):
        return {"s": to_jsonable(self.Z), "t": to_jsonable(self.X), "q": to_jsonable(self.Y)}


@dataclass(frozen=True)
class SeqMap:
    """Levelwise map of subtraction sequences; both squares are cartesian."""

    source: SeqObj
    target: SeqObj
    z: Any
    x: Any
    y: Any

    def sort_key(self):
        return (canon(self.source), canon(self.target), canon(self.x))

    def to_json(self):
        return {"source": to_jsonable(self.source), "target": to_jsonable(self.target), "x": to_jsonable(self.x)}


class F1PlusInstance(SWInstance):
    """Subtraction sequences of a concrete instance, with levelwise structure."""

    def __init__(self, base: ConcreteInstance, bound):
        if not isinstance(base, ConcreteInstance):
            raise PreconditionError("subtraction sequences are built over concrete instances")
        self.base = base
        self.bound = bound
        self.name = f"F1+({base.name})"
        self.symmetric_legs = base.symmetric_legs
        self._window: dict = {}
        self._homs: dict = {}

    def seq(self, c) -> SeqObj:
        f = self.base.subtraction(c)
        if f is None:
            raise PreconditionError("cofibration has no subtraction leg")
        return SeqObj(c, f)

    def lift(self, A: SeqObj, g, B: SeqObj):
        """The map ``A -> B`` lying over ``g: A.X -> B.X``, or None."""
        b = self.base
        z = b.factor(b.compose(g, A.cof), B.cof)
        y = b.factor(b.compose(g, A.fib), B.fib)
        if z is None or y is None:
            return None
        if not (b.is_cartesian(A.cof, z, g, B.cof) and b.is_cartesian(A.fib, y, g, B.fib)):
            return None
        return SeqMap(A, B, z, g, y)

    def restrict(self, A: SeqObj, s):
        """Pull ``A`` back along a monomorphism ``s: S -> A.X``."""
        b = self.base
        S = s.source
        elems = frozenset(e for e in b.carrier(S) if s(e) in A.cof.image())
        B = self.seq(b.sub(S, elems)[1])
        return B, self.lift(B, s, A)

    # structure
    @property
    def initial(self):
        return self.seq(self.base.identity(self.base.initial))

    def window(self, bound) -> tuple:
        bound = self.bound if bound is None else bound
        if bound not in self._window:
            out = [self.seq(c) for X in self.base.window(bound) for c in self.base.subobjects(X)]
            self._window[bound] = tuple(out)
        return self._window[bound]

    def size(self, A) -> int:
        return self.base.size(A.X)

    def hom(self, A, B) -> tuple:
        key = (A, B)
        if key not in self._homs:
            out = []
            for g in self.base.hom(A.X, B.X):
                m = self.lift(A, g, B)
                if m is not None:
                    out.append(m)
            self._homs[key] = tuple(out)
        return self._homs[key]

    def source(self, f):
        return f.source

    def target(self, f):
        return f.target

    def compose(self, g, f):
        b = self.base
        return SeqMap(f.source, g.target, b.compose(g.z, f.z), b.compose(g.x, f.x), b.compose(g.y, f.y))

    def identity(self, A):
        b = self.base
        return SeqMap(A, A, b.identity(A.Z), b.identity(A.X), b.identity(A.Y))

    def initial_map(self, A):
        return self.lift(self.initial, self.base.initial_map(A.X), A)

    def is_iso(self, f) -> bool:
        return self.base.is_iso(f.x)

    def isomorphisms(self, A, B) -> tuple:
        out = []
        for g in self.base.isomorphisms(A.X, B.X):
            m = self.lift(A, g, B)
            if m is not None:
                out.append(m)
        return tuple(out)

    def is_cofibration(self, f) -> bool:
        b = self.base
        return b.is_cofibration(f.z) and b.is_cofibration(f.x) and b.is_cofibration(f.y)

    def is_fibration(self, f) -> bool:
        b = self.base
        return b.is_fibration(f.z) and b.is_fibration(f.x) and b.is_fibration(f.y)

    def cofibrations_between(self, A, B) -> tuple:
        return tuple(m for m in (self.lift(A, g, B) for g in self.base.cofibrations_between(A.X, B.X)) if m is not None)

    def fibrations_between(self, A, B) -> tuple:
        return tuple(m for m in (self.lift(A, g, B) for g in self.base.fibrations_between(A.X, B.X)) if m is not None)

    def subobjects(self, A) -> tuple:
        return tuple(self.restrict(A, s)[1] for s in self.base.subobjects(A.X))

    def fibration_subobjects(self, A) -> tuple:
        return tuple(self.restrict(A, s)[1] for s in self.base.fibration_subobjects(A.X))

    def is_subtraction(self, c, f) -> bool:
        b = self.base
        return (
            c.target == f.target
            and b.is_subtraction(c.z, f.z)
            and b.is_subtraction(c.x, f.x)
            and b.is_subtraction(c.y, f.y)
        )

    def subtraction(self, c):
        leg = self.base.subtraction(c.x)
        return None if leg is None else self.restrict(c.target, leg)[1]

    def cosubtraction(self, f):
        leg = self.base.cosubtraction(f.x)
        return None if leg is None else self.restrict(f.target, leg)[1]

    def legs_for(self, c, bound=None) -> tuple:
        out = []
        for g in self.base.legs_for(c.x, bound if bound is not None else self.bound):
            for A in self.window(bound):
                if A.X == g.source:
                    m = self.lift(A, g, c.target)
                    if m is not None:
                        out.append(m)
        return tuple(out)

    def pullback(self, f, g):
        b = self.base
        pb = b.pullback(f.x, g.x)
        if pb is None:
            return None
        P, p1, p2 = pb
        C = f.target
        elems = frozenset(e for e in b.carrier(P) if f.x(p1(e)) in C.cof.image())
        B = self.seq(b.sub(P, elems)[1])
        m1, m2 = self.lift(B, p1, f.source), self.lift(B, p2, g.source)
        if m1 is None or m2 is None:
            return None
        return B, m1, m2

    def pushout(self, c1, c2):
        b = self.base
        P, j1, j2 = b.pushout(c1.x, c2.x)
        A1, A2 = c1.target, c2.target
        elems = frozenset(j1(A1.cof(z)) for z in b.carrier(A1.Z)) | frozenset(j2(A2.cof(z)) for z in b.carrier(A2.Z))
        B = self.seq(b.sub(P, elems)[1])
        return B, self.lift(A1, j1, B), self.lift(A2, j2, B)

    def is_cartesian(self, p1, p2, f, g) -> bool:
        b = self.base
        return all(
            b.is_cartesian(getattr(p1, k), getattr(p2, k), getattr(f, k), getattr(g, k)) for k in ("z", "x", "y")
        )

    def is_cocartesian(self, c1, c2, j1, j2) -> bool:
        b = self.base
        return all(
            b.is_cocartesian(getattr(c1, k), getattr(c2, k), getattr(j1, k), getattr(j2, k)) for k in ("z", "x", "y")
        )

    def factor(self, f, m):
        x = self.base.factor(f.x, m.x)
        return None if x is None else self.lift(f.source, x, m.source)

    def copair(self, po, a, b):
        P, j1, j2 = po
        x = self.base.copair((P.X, j1.x, j2.x), a.x, b.x)
        return self.lift(P, x, a.target)

    def pair(self, pb, a, b):
        P, p1, p2 = pb
        x = self.base.pair((P.X, p1.x, p2.x), a.x, b.x)
        return self.lift(a.source, x, P)

    def iso_label(self, A):
        # the middle term splits as Z + Y, so the pair of outer classes decides
        return (self.base.iso_label(A.Z), self.base.iso_label(A.Y))

    # the three projections
    def s(self, a):
        return a.Z if isinstance(a, SeqObj) else a.z

    def t(self, a):
        return a.X if isinstance(a, SeqObj) else a.x

    def q(self, a):
        return a.Y if isinstance(a, SeqObj) else a.y


def build_f1_plus(instance: ConcreteInstance, bound) -> F1PlusInstance:
    """Instance of subtraction sequences of ``instance`` within ``bound``."""
    import warnings

    out = F1PlusInstance(instance, bound)
    if len(out.window(bound)) <= 1:
        warnings.warn("bound admits only the empty subtraction sequence", stacklevel=2)
    return out
