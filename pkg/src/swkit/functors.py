"""Exact functors between subtraction instances and pointed finite sets.

A W-exact functor sends an instance to pointed sets: covariantly on
cofibrations, contravariantly on fibrations.  An op-W-exact functor goes
back.  The point-count functor and the unit functor are the bundled
examples; their composite is the identity on pointed sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable

from .core import (
    CheckReport,
    ConcreteInstance,
    Morphism,
    PreconditionError,
    sorted_elems,
)
from .instances import GSetInstance, PMap, PointedSets, atoms
from .k0 import K0Group
from .sdot import Flag, arrow_indices, face, validate_flag
from .varieties import VarietiesInstance, canonical_set, check_budget


# ---------------------------------------------------------------------------
# W-exact functors into pointed sets


@dataclass
class WExactFunctor:
    """``on_objects(X) -> n`` (meaning ``[n]_+``), ``lower(i)`` for cofibrations, ``upper(j)`` for fibrations.

    ``upper(j)`` for ``j: Y -> X`` is a pointed map ``[F X]_+ -> [F Y]_+``.
    """

    source: ConcreteInstance
    target: PointedSets
    on_objects: Callable
    lower: Callable
    upper: Callable
    name: str = "functor"


def lex_points(inst: ConcreteInstance, X) -> tuple:
    """The fixed linear order on the points of ``X``."""
    pts = getattr(X, "points", None)
    return tuple(pts) if pts is not None else sorted_elems(frozenset(inst.carrier(X)))


def point_count_functor(source: ConcreteInstance, max_size: int | None = None) -> WExactFunctor:
    """``X -> X(k)_+`` with points numbered ``1..n`` in lexicographic order.

    Closed immersions become injections; open immersions become restriction
    with everything outside the open part sent to the basepoint.  Works over
    any concrete instance (for finite sets it counts elements).
    """
    if isinstance(source, VarietiesInstance):
        check_budget(source.prime, source.num_vars)
    index_cache: dict = {}

    def index(X) -> dict:
        if X not in index_cache:
            index_cache[X] = {p: k + 1 for k, p in enumerate(lex_points(source, X))}
        return index_cache[X]

    def on_objects(X) -> int:
        return len(index(X))

    def lower(i: Morphism) -> PMap:
        s, t = index(i.source), index(i.target)
        images = [0] * (len(s) + 1)
        for p, k in s.items():
            images[k] = t[i(p)]
        return PMap(len(s), len(t), tuple(images))

    def upper(j: Morphism) -> PMap:
        s, t = index(j.source), index(j.target)
        images = [0] * (len(t) + 1)
        for p, k in s.items():
            images[t[j(p)]] = k
        return PMap(len(t), len(s), tuple(images))

    size = max_size if max_size is not None else 10**9
    return WExactFunctor(source, PointedSets(size), on_objects, lower, upper, f"points({source.name})")


def drop_open_points_functor(source: ConcreteInstance) -> WExactFunctor:
    """Broken variant: a proper open immersion forgets every point it restricts to.

    Functorial, but the image of a subtraction triple is no longer a cofiber
    sequence, so excision fails.
    """
    good = point_count_functor(source)

    def upper(j):
        m = good.upper(j)
        if m.source == m.target:
            return m
        return PMap(m.source, m.target, (0,) * (m.source + 1))

    return WExactFunctor(source, good.target, good.on_objects, good.lower, upper, f"drop-open({source.name})")


def _is_cofiber_sequence(cat: PointedSets, i: PMap, q: PMap) -> bool:
    return cat.is_cofibration(i) and i.target == q.source and cat.is_pushout_along_basepoint(i, q)


def check_w_exact(F: WExactFunctor, bound) -> CheckReport:
    """Functoriality, cofibration and fibration types, base change and excision within ``bound``."""
    src, cat = F.source, F.target
    rep = CheckReport(f"W-exactness of {F.name}")
    window = src.window(bound)
    for X in window:
        idx = src.identity(X)
        n = F.on_objects(X)
        rep.expect(F.lower(idx) == cat.identity(n), "identity", "identity cofibration does not go to the identity", X)
        rep.expect(F.upper(idx) == cat.identity(n), "identity", "identity fibration does not go to the identity", X)
        for c in src.subobjects(X):
            m = F.lower(c)
            rep.expect(m.source == F.on_objects(c.source) and m.target == n, "objects", "cofibration image has wrong ends", c)
            rep.expect(cat.is_cofibration(m), "cofibration", "cofibration does not go to a cofibration", c)
        for j in src.fibration_subobjects(X):
            m = F.upper(j)
            rep.expect(m.source == n and m.target == F.on_objects(j.source), "objects", "fibration image has wrong ends", j)

    # functoriality along chains of canonical subobjects
    for X in window:
        for g in src.subobjects(X):
            for f in src.subobjects(g.source):
                gf = src.compose(g, f)
                rep.expect(
                    F.lower(gf) == cat.compose(F.lower(g), F.lower(f)), "functoriality", "lower half is not functorial", (f, g)
                )
        for g in src.fibration_subobjects(X):
            for f in src.fibration_subobjects(g.source):
                gf = src.compose(g, f)
                rep.expect(
                    F.upper(gf) == cat.compose(F.upper(f), F.upper(g)), "functoriality", "upper half is not functorial", (f, g)
                )

    # base change on every cartesian square of a cofibration against a fibration
    for B in window:
        for i in src.subobjects(B):
            for j in src.fibration_subobjects(B):
                P, jp, ip = src.pullback(i, j)  # jp: P -> A, ip: P -> C
                lhs = cat.compose(F.upper(j), F.lower(i))
                rhs = cat.compose(F.lower(ip), F.upper(jp))
                rep.expect(lhs == rhs, "base change", "restriction does not commute with pushforward", (i, j))

    # excision
    for Y in window:
        for c in src.subobjects(Y):
            f = src.subtraction(c)
            rep.expect(
                _is_cofiber_sequence(cat, F.lower(c), F.upper(f)),
                "excision",
                "image of a subtraction triple is not a cofiber sequence",
                (c, f),
            )
    return rep.finalize()


def induced_k0_map(F: WExactFunctor, G: K0Group) -> dict:
    """Generator label -> size of its image; relations must go to zero in the integers."""
    reps = dict(zip(G.generators, G.presentation.representatives))
    return {g: F.on_objects(reps[g]) for g in G.generators}


def k0_map_is_homomorphism(F: WExactFunctor, G: K0Group) -> bool:
    images = induced_k0_map(F, G)
    gens = G.generators
    return all(sum(r[k] * images[gens[k]] for k in range(len(gens))) == 0 for r in G.presentation.relations)


# ---------------------------------------------------------------------------
# the unit functor


@dataclass
class OpWExactFunctor:
    """``on_objects(n)``; ``lower(f)`` for a pointed cofibration; ``upper(p)`` for a pointed fibration.

    For ``p: [m]_+ -> [n]_+`` the map ``upper(p)`` goes ``G(n) -> G(m)``.
    """

    source: PointedSets
    target: ConcreteInstance
    on_objects: Callable
    lower: Callable
    upper: Callable
    name: str = "functor"


def unit_functor(target: ConcreteInstance, max_size: int = 6, labeling: str = "lex") -> OpWExactFunctor:
    """``[n]_+ -> `` the disjoint union of ``n`` points (the basepoint contributes nothing).

    Over a varieties instance the ``k``-th point is the ``k``-th point of
    affine space in lexicographic order.  Over a G-set instance it is the
    ``k``-th atom with trivial action.  ``labeling="reversed"`` numbers the
    chosen points backwards; the composite with point counting is then only
    naturally isomorphic to the identity.
    """
    if labeling not in ("lex", "reversed"):
        raise PreconditionError(f"unknown labeling {labeling!r}")
    if isinstance(target, VarietiesInstance):
        p, d = target.prime, target.num_vars
        if p**d < max_size:
            raise PreconditionError(f"F{p}^{d} has fewer than {max_size} points")
        pool = list(itertools.product(range(p), repeat=d))[:max_size]

        def obj(n):
            return canonical_set(p, d, frozenset(pool[:n]))

    elif isinstance(target, GSetInstance):
        pool = list(atoms(max_size))

        def obj(n):
            return target.trivial(frozenset(pool[:n]))

    else:
        raise PreconditionError("the unit functor targets a varieties or G-set instance")

    def point(n, k):
        # point numbered k (1-based) in G([n]_+)
        return pool[k - 1] if labeling == "lex" else pool[n - k]

    def lower(f: PMap) -> Morphism:
        if not PointedSets(max_size).is_cofibration(f):
            raise PreconditionError("lower half is defined on cofibrations")
        return Morphism.from_mapping(
            obj(f.source), obj(f.target), {point(f.source, k): point(f.target, f(k)) for k in range(1, f.source + 1)}
        )

    def upper(q: PMap) -> Morphism:
        cat = PointedSets(max_size)
        if not cat.is_fibration(q):
            raise PreconditionError("upper half is defined on fibrations")
        return Morphism.from_mapping(
            obj(q.target), obj(q.source), {point(q.target, j): point(q.source, q.preimage(j)[0]) for j in range(1, q.target + 1)}
        )

    return OpWExactFunctor(PointedSets(max_size), target, obj, lower, upper, f"unit({target.name},{labeling})")


def _iter_cofibrations(cat: PointedSets, max_size: int):
    for m in range(max_size + 1):
        for n in range(m + 1):
            yield from cat.cofibrations(n, m)


def _iter_fibrations(cat: PointedSets, max_size: int):
    # a fibration [m]_+ -> [n]_+ picks a distinct preimage for each non-basepoint
    for m in range(max_size + 1):
        for n in range(m + 1):
            for pre in itertools.permutations(range(1, m + 1), n):
                images = [0] * (m + 1)
                for j, i in enumerate(pre, start=1):
                    images[i] = j
                yield PMap(m, n, tuple(images))


def check_op_w_exact(G: OpWExactFunctor, max_size: int = 6, composites_up_to: int | None = None) -> CheckReport:
    """Op-W-exactness of ``G`` on pointed sets up to ``max_size``.

    Composites are checked exhaustively for ends of size ``<= composites_up_to``
    (default ``max_size``).  Base change is checked on one square per
    isomorphism class; functoriality on isomorphisms transports it to the rest.
    """
    cat = PointedSets(max_size)
    T = G.target
    rep = CheckReport(f"op-W-exactness of {G.name}")
    cu = max_size if composites_up_to is None else composites_up_to
    cofs = list(_iter_cofibrations(cat, max_size))
    fibs = list(_iter_fibrations(cat, max_size))
    low = {f: G.lower(f) for f in cofs}
    up = {p: G.upper(p) for p in fibs}

    for n in range(max_size + 1):
        X = G.on_objects(n)
        rep.expect(T.size(X) == n, "objects", "object has the wrong number of points", n)
        rep.expect(low[cat.identity(n)] == T.identity(X), "identity", "identity cofibration is not sent to the identity", n)
        rep.expect(up[cat.identity(n)] == T.identity(X), "identity", "identity fibration is not sent to the identity", n)
    for f in cofs:
        rep.expect(T.is_cofibration(low[f]), "cofibration", "cofibration is not sent to a cofibration", f)
    for p in fibs:
        rep.expect(T.is_fibration(up[p]), "fibration", "fibration is not sent to a fibration", p)

    # functoriality, compared pointwise on tables
    by_target: dict = {}
    for f in cofs:
        by_target.setdefault(f.target, []).append(f)
    for g in cofs:
        if g.target > cu:
            continue
        tg = low[g].table
        for f in by_target.get(g.source, ()):
            tf, tgf = low[f].table, low[cat.compose(g, f)].table
            rep.expect(all(tg[tf[x]] == y for x, y in tgf.items()), "functoriality", "lower half is not functorial", (f, g))
    fib_by_target: dict = {}
    for p in fibs:
        fib_by_target.setdefault(p.target, []).append(p)
    for q in fibs:
        if q.source > cu:
            continue
        tq = up[q].table
        for p in fib_by_target.get(q.source, ()):
            # (q p)^* = p^* q^*
            tp, tqp = up[p].table, up[cat.compose(q, p)].table
            rep.expect(all(tp[tq[x]] == y for x, y in tqp.items()), "functoriality", "upper half is not functorial", (p, q))

    # excision: cofiber sequences go to subtraction triples
    for f in cofs:
        q = cat.cofiber(f)
        rep.expect(T.is_subtraction(low[f], up[q]), "excision", "cofiber sequence is not sent to a subtraction triple", f)

    # base change on squares A -i1-> B -p2-> D, A -p1-> C -i2-> D with i1 standard and p2 order-preserving
    for b in range(max_size + 1):
        for a in range(b + 1):
            i1 = PMap(a, b, tuple(range(a + 1)))
            for d in range(b + 1):
                for support in itertools.combinations(range(1, b + 1), d):
                    images = [0] * (b + 1)
                    for j, s in enumerate(support, start=1):
                        images[s] = j
                    p2 = PMap(b, d, tuple(images))
                    top = cat.compose(p2, i1)
                    hit = sorted(top(x) for x in range(1, a + 1) if top(x))
                    c = len(hit)
                    pos = {v: k + 1 for k, v in enumerate(hit)}
                    p1 = PMap(a, c, tuple(pos.get(top(x), 0) if x else 0 for x in range(a + 1)))
                    i2 = PMap(c, d, (0, *hit))
                    # the square is cartesian in the target: compare both routes G(C) -> G(B)
                    lhs = T.compose(G.lower(i1), G.upper(p1))
                    rhs = T.compose(G.upper(p2), G.lower(i2))
                    rep.expect(lhs == rhs, "base change", "square of wrong-way maps is not preserved", (i1, p2))
    return rep.finalize()


# ---------------------------------------------------------------------------
# splitting


@dataclass
class SplittingVerdict:
    strict: bool
    up_to_iso: bool
    objects_checked: int
    morphisms_checked: int
    first_failure: Any = None

    def to_json(self):
        return {
            "strict": self.strict,
            "up_to_iso": self.up_to_iso,
            "objects_checked": self.objects_checked,
            "morphisms_checked": self.morphisms_checked,
            "first_failure": None if self.first_failure is None else str(self.first_failure),
        }


def check_splitting(max_size: int = 6, prime: int = 2, labeling: str = "lex") -> SplittingVerdict:
    """Is point-count after unit the identity on pointed sets up to ``max_size``?

    ``strict`` compares maps exactly.  ``up_to_iso`` looks for the natural
    isomorphism given by the point numbering and checks naturality on every map.
    """
    d = 1
    while prime**d < max_size:
        d += 1
    V = VarietiesInstance(prime, d)
    G = unit_functor(V, max_size, labeling)
    P = point_count_functor(V)
    cat = PointedSets(max_size)
    first = None
    strict = True
    phi = {}
    for n in range(max_size + 1):
        X = G.on_objects(n)
        if P.on_objects(X) != n:
            return SplittingVerdict(False, False, n + 1, 0, ("object", n))
        # phi_n: k -> position of G's k-th point in the fixed order
        ids = {p: k + 1 for k, p in enumerate(lex_points(V, X))}
        order = [None] * (n + 1)
        for k in range(1, n + 1):
            order[k] = ids[_labelled_point(G, n, k)]
        phi[n] = PMap(n, n, (0, *order[1:]))
    count = 0
    natural = True
    for f in _iter_cofibrations(cat, max_size):
        count += 1
        img = P.lower(G.lower(f))
        if img != f:
            strict = False
            first = first or ("cofibration", f, img)
        natural &= cat.compose(phi[f.target], f) == cat.compose(img, phi[f.source])
    for q in _iter_fibrations(cat, max_size):
        count += 1
        img = P.upper(G.upper(q))
        if img != q:
            strict = False
            first = first or ("fibration", q, img)
        natural &= cat.compose(phi[q.target], q) == cat.compose(img, phi[q.source])
    return SplittingVerdict(strict, natural, max_size + 1, count, first)


def _labelled_point(G: OpWExactFunctor, n: int, k: int):
    """The point ``G`` numbers ``k`` in ``G([n]_+)``, read off the inclusion of ``[1]_+``."""
    f = PMap(1, n, (0, k))
    return next(iter(G.lower(f).table.values()))


# ---------------------------------------------------------------------------
# induced maps on flags


@dataclass(frozen=True)
class PointedFlag:
    """Flag of pointed sets: injections along rows, collapse maps ``X[i, j] -> X[i+1, j]`` down columns."""

    n: int
    objects: tuple
    horiz: tuple
    quot: tuple

    @property
    def X(self) -> dict:
        return dict(self.objects)

    @property
    def H(self) -> dict:
        return dict(self.horiz)

    @property
    def Q(self) -> dict:
        return dict(self.quot)

    def to_json(self):
        return {
            "degree": self.n,
            "objects": [[i, j, n] for (i, j), n in self.objects],
            "horizontal": [[i, j, list(m.images)] for (i, j), m in self.horiz],
            "quotient": [[i, j, list(m.images)] for (i, j), m in self.quot],
        }


def induced_flag_map(F: WExactFunctor, flag: Flag) -> PointedFlag:
    X, H, V = flag.X, flag.H, flag.V
    objs = {a: F.on_objects(X[a]) for a in arrow_indices(flag.n)}
    horiz = {k: F.lower(m) for k, m in H.items()}
    quot = {k: F.upper(m) for k, m in V.items()}
    return PointedFlag(flag.n, tuple(sorted(objs.items())), tuple(sorted(horiz.items())), tuple(sorted(quot.items())))


def _pcompose_h(cat, P: PointedFlag, i, j, k) -> PMap:
    m = cat.identity(P.X[(i, j)])
    for t in range(j, k):
        m = cat.compose(P.H[(i, t)], m)
    return m


def _pcompose_q(cat, P: PointedFlag, i, j, k) -> PMap:
    # X[i, k] -> X[j, k]
    m = cat.identity(P.X[(i, k)])
    for t in range(i, j):
        m = cat.compose(P.Q[(t, k)], m)
    return m


def validate_pointed_flag(P: PointedFlag, max_size: int = 10**9) -> CheckReport:
    cat = PointedSets(max_size)
    rep = CheckReport(f"pointed flag of degree {P.n}")
    for i in range(P.n + 1):
        rep.expect(P.X[(i, i)] == 0, "basepoint", "diagonal entry is not the one-point set", i)
    for key, m in P.horiz:
        rep.expect(cat.is_cofibration(m), "cofibration", "row map is not injective", key)
    for i, j, k in itertools.combinations_with_replacement(range(P.n + 1), 3):
        h = _pcompose_h(cat, P, i, j, k)
        q = _pcompose_q(cat, P, i, j, k)
        rep.expect(cat.is_pushout_along_basepoint(h, q), "cofiber", "row and column do not form a cofiber sequence", (i, j, k))
    for (i, j), m in P.horiz:
        if i + 1 <= j:
            lhs = cat.compose(P.Q[(i, j + 1)], m)
            rhs = cat.compose(P.H[(i + 1, j)], P.Q[(i, j)])
            rep.expect(lhs == rhs, "commute", "square does not commute", (i, j))
    return rep.finalize()


def pointed_face(P: PointedFlag, k: int) -> PointedFlag:
    """``d_k`` on a pointed flag: drop row and column ``k``."""
    cat = PointedSets(10**9)
    sig = [a if a < k else a + 1 for a in range(P.n)]
    m = P.n - 1
    objs = {(a, b): P.X[(sig[a], sig[b])] for a, b in arrow_indices(m)}
    horiz = {(a, b): _pcompose_h(cat, P, sig[a], sig[b], sig[b + 1]) for a in range(m + 1) for b in range(a, m)}
    quot = {(a, b): _pcompose_q(cat, P, sig[a], sig[a + 1], sig[b]) for b in range(m + 1) for a in range(b)}
    return PointedFlag(m, tuple(sorted(objs.items())), tuple(sorted(horiz.items())), tuple(sorted(quot.items())))


def check_flag_naturality(F: WExactFunctor, flags) -> CheckReport:
    """Image flags are valid and ``d_k`` commutes with the induced map."""
    rep = CheckReport(f"flag map of {F.name}")
    for flag in flags:
        img = induced_flag_map(F, flag)
        rep.merge(validate_pointed_flag(img), prefix="image-")
        for k in range(flag.n + 1 if flag.n else 0):
            rep.expect(
                pointed_face(img, k) == induced_flag_map(F, face(F.source, k, flag)),
                "face",
                "face map does not commute with the induced map",
                (k, flag.to_json()),
            )
    return rep.finalize()


def is_valid_source_flag(F: WExactFunctor, flag: Flag) -> bool:
    return validate_flag(F.source, flag).ok
