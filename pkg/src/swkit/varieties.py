"""Constructible subsets of affine space over a prime field, modelled by their points.

Polynomials are sparse maps from exponent vectors to coefficients mod p.
A :class:`ConstructibleSet` pairs a system of equations and inequations
with its (cached, verified) point set; morphisms carry coordinate
polynomials and are evaluated pointwise.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .core import BudgetExceeded, ConcreteInstance, PreconditionError, StructuralError, canon

BUDGET_ENV = "SWKIT_BUDGET"
DEFAULT_BUDGET = 10**7


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise PreconditionError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class Poly:
    """Sparse polynomial over F_p in ``nvars`` variables.

    ``terms`` is a sorted tuple of ``(exponents, coefficient)`` with nonzero
    coefficients in ``1..p-1``.
    """

    prime: int
    nvars: int
    terms: tuple = ()

    @classmethod
    def from_dict(cls, prime: int, nvars: int, d: dict) -> "Poly":
        out = {}
        for e, c in d.items():
            e = tuple(e)
            if len(e) != nvars:
                raise StructuralError(f"exponent vector {e} does not have length {nvars}")
            c %= prime
            if c:
                out[e] = c
        return cls(prime, nvars, tuple(sorted(out.items())))

    @classmethod
    def const(cls, prime: int, nvars: int, c: int) -> "Poly":
        return cls.from_dict(prime, nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, prime: int, nvars: int, i: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls.from_dict(prime, nvars, {tuple(e): 1})

    @cached_property
    def as_dict(self) -> dict:
        return dict(self.terms)

    def _check(self, other: "Poly"):
        if (self.prime, self.nvars) != (other.prime, other.nvars):
            raise PreconditionError("polynomials live in different rings")

    def _lift(self, other) -> "Poly":
        if isinstance(other, int):
            return Poly.const(self.prime, self.nvars, other)
        self._check(other)
        return other

    def __add__(self, other):
        other = self._lift(other)
        d = dict(self.as_dict)
        for e, c in other.terms:
            d[e] = d.get(e, 0) + c
        return Poly.from_dict(self.prime, self.nvars, d)

    __radd__ = __add__

    def __neg__(self):
        return Poly.from_dict(self.prime, self.nvars, {e: -c for e, c in self.terms})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        d: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d.get(e, 0) + c1 * c2
        return Poly.from_dict(self.prime, self.nvars, d)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise PreconditionError("negative powers are not polynomials")
        out = Poly.const(self.prime, self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=-1)

    def __call__(self, point: Sequence[int]) -> int:
        p = self.prime
        total = 0
        for e, c in self.terms:
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * pow(x, k, p) % p
            total += v
        return total % p

    def reduced(self) -> "Poly":
        """Same function on F_p^n with every exponent below p (``x^p = x``)."""
        p = self.prime
        d: dict = {}
        for e, c in self.terms:
            r = tuple(k if k < p else (k - 1) % (p - 1) + 1 for k in e)
            d[r] = d.get(r, 0) + c
        return Poly.from_dict(p, self.nvars, d)

    def shifted(self, offset: int, nvars: int) -> "Poly":
        """Rename ``x_i`` to ``x_{i+offset}`` inside a ring of ``nvars`` variables."""
        d = {}
        for e, c in self.terms:
            ne = [0] * nvars
            ne[offset : offset + len(e)] = e
            d[tuple(ne)] = c
        return Poly.from_dict(self.prime, nvars, d)

    def substitute(self, values: Sequence["Poly"]) -> "Poly":
        """Compose with the polynomial map given by ``values`` (one per variable)."""
        if len(values) != self.nvars:
            raise PreconditionError("substitution needs one polynomial per variable")
        if not values:
            return self
        ring = values[0]
        out = Poly(self.prime, ring.nvars)
        for e, c in self.terms:
            term = Poly.const(self.prime, ring.nvars, c)
            for v, k in zip(values, e):
                if k:
                    term = term * v**k
            out = out + term
        return out

    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"x{i + 1}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms, key=lambda t: (-sum(t[0]), tuple(-k for k in t[0]))):
            factors = [n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append("*".join([str(c), *factors]))
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly[F{self.prime}]({self.format()})"

    def sort_key(self):
        return (self.prime, self.nvars, self.terms)


def delta(prime: int, nvars: int, point: Sequence[int]) -> Poly:
    """Indicator polynomial of a single point: 1 there, 0 elsewhere."""
    out = Poly.const(prime, nvars, 1)
    for i, s in enumerate(point):
        diff = Poly.var(prime, nvars, i) - s
        out = out * (1 - diff ** (prime - 1))
    return out


def indicator(prime: int, nvars: int, points: Iterable[Sequence[int]]) -> Poly:
    out = Poly(prime, nvars)
    for s in points:
        out = out + delta(prime, nvars, s)
    return out


def any_nonzero(prime: int, nvars: int, polys: Sequence[Poly]) -> Poly:
    """One polynomial that is nonzero exactly where some ``polys`` entry is nonzero."""
    if len(polys) == 1:
        return polys[0]
    prod = Poly.const(prime, nvars, 1)
    for g in polys:
        prod = prod * (1 - g ** (prime - 1))
    return (1 - prod).reduced()


# ---------------------------------------------------------------------------
# systems and point sets


@dataclass(frozen=True)
class PolySystem:
    prime: int
    num_vars: int
    equations: tuple = ()
    inequations: tuple = ()

    def __post_init__(self):
        if not is_prime(self.prime):
            raise PreconditionError(f"{self.prime} is not prime")
        for f in (*self.equations, *self.inequations):
            if f.prime != self.prime or f.nvars != self.num_vars:
                raise StructuralError("polynomial does not match the system's field or variable count")

    def holds(self, point) -> bool:
        return all(f(point) == 0 for f in self.equations) and all(g(point) != 0 for g in self.inequations)

    def sort_key(self):
        return (self.prime, self.num_vars, tuple(f.terms for f in self.equations), tuple(g.terms for g in self.inequations))


def check_budget(prime: int, num_vars: int, budget: int | None = None) -> int:
    budget = default_budget() if budget is None else budget
    need = prime**num_vars
    if need > budget:
        raise BudgetExceeded(f"enumerating F_{prime}^{num_vars}", need, budget)
    return need


def enumerate_points(system: PolySystem, budget: int | None = None) -> tuple:
    """All points of the system, in lexicographic order."""
    check_budget(system.prime, system.num_vars, budget)
    return tuple(x for x in itertools.product(range(system.prime), repeat=system.num_vars) if system.holds(x))


def enumerate_points_numpy(system: PolySystem, budget: int | None = None) -> tuple:
    """Vectorized evaluation over the whole grid; same contract as :func:`enumerate_points`."""
    p, n = system.prime, system.num_vars
    check_budget(p, n, budget)
    if n == 0:
        grid = np.zeros((1, 0), dtype=np.int64)
    else:
        axes = np.meshgrid(*[np.arange(p, dtype=np.int64)] * n, indexing="ij")
        grid = np.stack([a.ravel() for a in axes], axis=1)

    def values(f: Poly):
        total = np.zeros(len(grid), dtype=np.int64)
        for e, c in f.terms:
            term = np.full(len(grid), c, dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    powtab = np.array([pow(v, k, p) for v in range(p)], dtype=np.int64)
                    term = term * powtab[grid[:, i]] % p
            total = (total + term) % p
        return total

    mask = np.ones(len(grid), dtype=bool)
    for f in system.equations:
        mask &= values(f) == 0
    for g in system.inequations:
        mask &= values(g) != 0
    return tuple(tuple(int(v) for v in row) for row in grid[mask])


@dataclass(frozen=True, eq=False)
class ConstructibleSet:
    """A system together with its verified point set."""

    system: PolySystem
    points: tuple = field(default=None)

    def __post_init__(self):
        pts = enumerate_points(self.system)
        if self.points is not None and tuple(sorted(self.points)) != pts:
            raise StructuralError("declared points do not match the system")
        object.__setattr__(self, "points", pts)

    @property
    def prime(self) -> int:
        return self.system.prime

    @property
    def num_vars(self) -> int:
        return self.system.num_vars

    @cached_property
    def point_set(self) -> frozenset:
        return frozenset(self.points)

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        return isinstance(other, ConstructibleSet) and self.system == other.system

    @cached_property
    def _hash(self) -> int:
        return hash(self.system)

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return (self.prime, self.num_vars, len(self.points), self.points, self.system.sort_key())

    def to_json(self):
        return {"prime": self.prime, "num_vars": self.num_vars, "points": [list(x) for x in self.points]}

    def __repr__(self):
        return f"ConstructibleSet(F{self.prime}^{self.num_vars}, {len(self.points)} points)"


def affine_space(prime: int, num_vars: int) -> ConstructibleSet:
    return ConstructibleSet(PolySystem(prime, num_vars))


def constructible(prime: int, num_vars: int, equations=(), inequations=()) -> ConstructibleSet:
    return ConstructibleSet(PolySystem(prime, num_vars, tuple(equations), tuple(inequations)))


@lru_cache(maxsize=None)
def canonical_set(prime: int, num_vars: int, points: frozenset) -> ConstructibleSet:
    """The constructible set cut out by ``1 - indicator(points) = 0``."""
    eq = (1 - indicator(prime, num_vars, sorted(points))).reduced()
    return ConstructibleSet(PolySystem(prime, num_vars, (eq,) if not eq.is_zero() else ()))


# ---------------------------------------------------------------------------
# morphisms

KINDS = ("closed-immersion", "open-immersion", "general")


def interpolate(prime: int, nvars: int, mapping: dict, out_dim: int) -> tuple:
    """Coordinate polynomials realizing a point map on a finite domain."""
    coords = [Poly(prime, nvars) for _ in range(out_dim)]
    for s, t in sorted(mapping.items()):
        d = delta(prime, nvars, s)
        for j in range(out_dim):
            if t[j]:
                coords[j] = coords[j] + d * t[j]
    return tuple(c.reduced() for c in coords)


@dataclass(frozen=True, eq=False)
class VarMorphism:
    """Polynomial map between constructible sets.

    ``extra`` records the equations (closed immersion) or inequations (open
    immersion) that cut the image out of the target.
    """

    source: ConstructibleSet
    target: ConstructibleSet
    coordinate_map: tuple
    kind: str = "general"
    extra: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PreconditionError(f"unknown morphism kind {self.kind!r}")
        if len(self.coordinate_map) != self.target.num_vars:
            raise StructuralError("coordinate map length differs from the target dimension")
        tgt = self.target.point_set
        for x in self.source.points:
            if self(x) not in tgt:
                raise StructuralError(f"point {x} maps outside the target")
        if self.kind != "general" and len(set(self.point_map.values())) != len(self.source.points):
            raise StructuralError("immersion is not injective on points")

    def __call__(self, x):
        return tuple(f(x) for f in self.coordinate_map)

    @cached_property
    def point_map(self) -> dict:
        return {x: self(x) for x in self.source.points}

    def image(self) -> frozenset:
        return frozenset(self.point_map.values())

    def compose_after(self, g: "VarMorphism") -> "VarMorphism":
        """``self ∘ g``."""
        coords = tuple(f.substitute(list(g.coordinate_map)) for f in self.coordinate_map)
        return VarMorphism(g.source, self.target, coords)


def from_point_map(source: ConstructibleSet, target: ConstructibleSet, mapping: dict, kind="general") -> VarMorphism:
    coords = interpolate(source.prime, source.num_vars, mapping, target.num_vars)
    return VarMorphism(source, target, coords, kind)


def identity_coords(prime: int, n: int) -> tuple:
    return tuple(Poly.var(prime, n, i) for i in range(n))


def closed_subset(X: ConstructibleSet, extra_equations) -> tuple:
    """``(Z, Z -> X)`` where ``Z`` adds ``extra_equations`` to the system of ``X``."""
    extra = tuple(extra_equations)
    s = X.system
    Z = ConstructibleSet(PolySystem(s.prime, s.num_vars, s.equations + extra, s.inequations))
    return Z, VarMorphism(Z, X, identity_coords(s.prime, s.num_vars), "closed-immersion", extra)


def open_subset(X: ConstructibleSet, inequations) -> tuple:
    extra = tuple(inequations)
    s = X.system
    U = ConstructibleSet(PolySystem(s.prime, s.num_vars, s.equations, s.inequations + extra))
    return U, VarMorphism(U, X, identity_coords(s.prime, s.num_vars), "open-immersion", extra)


def subtraction_sequence_of(c: VarMorphism) -> tuple:
    """``(Z -> X, X-Z -> X)`` for a closed immersion cut out by added equations."""
    if c.kind != "closed-immersion":
        raise PreconditionError("subtraction needs a closed immersion")
    X = c.target
    if c.extra:
        h = any_nonzero(X.prime, X.num_vars, list(c.extra))
    else:
        h = Poly(X.prime, X.num_vars)
    U, o = open_subset(X, [h])
    if U.point_set & c.image() or (U.point_set | c.image()) != X.point_set:
        raise StructuralError("complement does not partition the points")
    return c, o


def fiber_product(f: VarMorphism, g: VarMorphism) -> tuple:
    """``(P, P -> source f, P -> source g)`` with ``P = {(x, y) : f(x) = g(y)}``."""
    if f.target != g.target:
        raise PreconditionError("fiber product needs a shared target")
    X, Y = f.source, g.source
    p, nx, ny = X.prime, X.num_vars, Y.num_vars
    n = nx + ny
    check_budget(p, n)
    eqs = [e.shifted(0, n) for e in X.system.equations] + [e.shifted(nx, n) for e in Y.system.equations]
    eqs += [fj.shifted(0, n) - gj.shifted(nx, n) for fj, gj in zip(f.coordinate_map, g.coordinate_map)]
    neqs = [e.shifted(0, n) for e in X.system.inequations] + [e.shifted(nx, n) for e in Y.system.inequations]
    P = ConstructibleSet(PolySystem(p, n, tuple(eqs), tuple(neqs)))
    pr1 = tuple(Poly.var(p, n, i) for i in range(nx))
    pr2 = tuple(Poly.var(p, n, nx + i) for i in range(ny))
    # the pulled-back leg inherits the kind of the leg it was pulled back from
    return P, VarMorphism(P, X, pr1, g.kind), VarMorphism(P, Y, pr2, f.kind)


def pushout_closed(c1: VarMorphism, c2: VarMorphism) -> tuple:
    """Glue ``X <- Z -> Y`` along closed immersions, tagging by one extra coordinate."""
    if c1.kind != "closed-immersion" or c2.kind != "closed-immersion":
        raise PreconditionError("pushout needs two closed immersions")
    if c1.source != c2.source:
        raise PreconditionError("pushout needs a shared source")
    X, Y, Z = c1.target, c2.target, c1.source
    p = X.prime
    n = max(X.num_vars, Y.num_vars) + 1

    def pad(x, tag):
        return tuple(x) + (0,) * (n - 1 - len(x)) + (tag,)

    back = {c2(z): c1(z) for z in Z.points}
    jx = {x: pad(x, 0) for x in X.points}
    jy = {y: (pad(back[y], 0) if y in back else pad(y, 1)) for y in Y.points}
    P = canonical_set(p, n, frozenset(jx.values()) | frozenset(jy.values()))
    return P, from_point_map(X, P, jx, "closed-immersion"), from_point_map(Y, P, jy, "closed-immersion")


def product(X: ConstructibleSet, Y: ConstructibleSet) -> ConstructibleSet:
    p, nx, ny = X.prime, X.num_vars, Y.num_vars
    if Y.prime != p:
        raise PreconditionError("product needs a common field")
    n = nx + ny
    check_budget(p, n)
    eqs = [e.shifted(0, n) for e in X.system.equations] + [e.shifted(nx, n) for e in Y.system.equations]
    neqs = [e.shifted(0, n) for e in X.system.inequations] + [e.shifted(nx, n) for e in Y.system.inequations]
    return ConstructibleSet(PolySystem(p, n, tuple(eqs), tuple(neqs)))


def pushout_product(c1: VarMorphism, c2: VarMorphism) -> VarMorphism:
    """``X x B  ⊔_{A x B}  A x Y  ->  X x Y`` for closed immersions ``A -> X``, ``B -> Y``."""
    XY = product(c1.target, c2.target)
    image = {(*x, *b) for x in c1.target.points for b in c2.image()} | {
        (*a, *y) for a in c1.image() for y in c2.target.points
    }
    glued = canonical_set(XY.prime, XY.num_vars, frozenset(image))
    return from_point_map(glued, XY, {x: x for x in glued.points}, "closed-immersion")


# ---------------------------------------------------------------------------
# the instance


class VarietiesInstance(ConcreteInstance):
    """Canonical constructible subsets of ``F_p^n`` with at most ``bound`` points.

    Morphisms are arbitrary point maps (each is polynomial by interpolation);
    cofibrations and fibrations are the injective ones.
    """

    def __init__(self, prime: int, num_vars: int, bound: int | None = None, **kw):
        if not is_prime(prime):
            raise PreconditionError(f"{prime} is not prime")
        check_budget(prime, num_vars)
        super().__init__(**kw)
        self.prime = prime
        self.num_vars = num_vars
        self.bound = prime**num_vars if bound is None else bound
        self.name = f"varieties(F{prime}^{num_vars},<={self.bound})"
        self._windows: dict = {}

    @property
    def initial(self):
        return canonical_set(self.prime, self.num_vars, frozenset())

    def carrier(self, X):
        return X.point_set

    def make_sub(self, X, elements):
        return canonical_set(X.prime, X.num_vars, frozenset(elements))

    def can_union(self, X, Y) -> bool:
        return X.num_vars == Y.num_vars

    def tag(self, X, Y):
        n = max(X.num_vars, Y.num_vars)
        return (lambda x: tuple(x) + (0,) * (n - len(x)) + (0,)), (lambda y: tuple(y) + (0,) * (n - len(y)) + (1,))

    def assemble(self, elements, parts):
        if elements:
            n = len(next(iter(elements)))
        else:
            n = parts[0][0].num_vars
        return canonical_set(self.prime, n, frozenset(elements))

    def pair_element(self, X, Y, x, y):
        return tuple(x) + tuple(y)

    def product_object(self, X, Y, elements):
        return canonical_set(self.prime, X.num_vars + Y.num_vars, frozenset(elements))

    def window(self, bound):
        b = self.bound if bound is None else min(bound, self.bound)
        if b not in self._windows:
            pts = list(itertools.product(range(self.prime), repeat=self.num_vars))
            objs = [
                canonical_set(self.prime, self.num_vars, frozenset(c))
                for r in range(min(b, len(pts)) + 1)
                for c in itertools.combinations(pts, r)
            ]
            self._windows[b] = tuple(sorted(objs, key=canon))
        return self._windows[b]

    def compute_iso_label(self, X):
        return len(X.points)

    def describe(self, X) -> str:
        return "{" + ",".join("(" + ",".join(map(str, x)) + ")" for x in X.points) + "}"

    def as_var_morphism(self, m) -> VarMorphism:
        kind = "closed-immersion" if m.is_injective() else "general"
        return from_point_map(m.source, m.target, m.table, kind)


def varieties_instance(prime: int, num_vars: int, bound: int | None = None) -> VarietiesInstance:
    return VarietiesInstance(prime, num_vars, bound)
