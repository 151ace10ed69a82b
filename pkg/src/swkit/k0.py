"""Grothendieck groups of bounded windows, computed by exact Smith normal form.

Generators are isomorphism classes of window objects; each subtraction
triple ``X -> Y <- Y-X`` contributes the relation ``[Y] - [X] - [Y-X]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    CheckReport,
    ConcreteInstance,
    PreconditionError,
    StructuralError,
    SWInstance,
    _attempt,
    build_f1_plus,
    sorted_elems,
    to_jsonable,
)


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class GroupInvariants:
    """``Z^free_rank`` plus cyclic factors ``Z/d`` with ``d_1 | d_2 | ...``."""

    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        if any(d <= 1 for d in self.torsion):
            raise ValueError("torsion factors must exceed 1")
        if any(b % a for a, b in zip(self.torsion, self.torsion[1:])):
            raise ValueError("torsion factors must form a divisibility chain")

    def to_json(self):
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


@dataclass(frozen=True)
class SmithForm:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    M: tuple
    U: tuple
    D: tuple
    V: tuple
    rows: int
    cols: int

    @property
    def diagonal(self) -> tuple:
        return tuple(self.D[i][i] for i in range(min(self.rows, self.cols)))

    @property
    def invariants(self) -> GroupInvariants:
        nonzero = [d for d in self.diagonal if d != 0]
        return GroupInvariants(self.cols - len(nonzero), tuple(d for d in nonzero if d > 1))


def _identity(n: int) -> list:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(matrix: Sequence[Sequence[int]], cols: int | None = None) -> SmithForm:
    """Exact Smith normal form with transform matrices.

    ``cols`` fixes the width when ``matrix`` has no rows.  Pivots are chosen
    by least absolute value; the certificate is verified before returning.
    """
    A = [[int(x) for x in row] for row in matrix]
    r = len(A)
    c = len(A[0]) if A else (cols or 0)
    if cols is not None and A and c != cols:
        raise StructuralError("matrix width does not match the declared column count")
    if any(len(row) != c for row in A):
        raise StructuralError("ragged matrix")
    U, V = _identity(r), _identity(c)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (A, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):  # row dst += k * row src
        if k:
            A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
            U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, k):
        if k:
            for M in (A, V):
                for row in M:
                    row[dst] += k * row[src]

    t = 0
    while t < min(r, c):
        entries = [(abs(A[i][j]), i, j) for i in range(t, r) for j in range(t, c) if A[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, r):
                if A[i][t]:
                    add_row(t, i, -(A[i][t] // p))
                    dirty |= A[i][t] != 0
            for j in range(t + 1, c):
                if A[t][j]:
                    add_col(t, j, -(A[t][j] // p))
                    dirty |= A[t][j] != 0
            if dirty:
                # a remainder is smaller than the pivot: move it into place
                _, pi, pj = min(
                    (abs(A[i][j]), i, j) for i in range(t, r) for j in range(t, c) if A[i][j] and (i == t or j == t)
                )
                swap_rows(t, pi)
                swap_cols(t, pj)
                continue
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    form = SmithForm(
        tuple(tuple(row) for row in matrix),
        tuple(map(tuple, U)),
        tuple(map(tuple, A)),
        tuple(map(tuple, V)),
        r,
        c,
    )
    verify_certificate(form)
    return form


def integer_determinant(M: Sequence[Sequence[int]]) -> int:
    """Fraction-free (Bareiss) determinant of a square integer matrix."""
    A = [list(map(int, row)) for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def verify_certificate(form: SmithForm) -> None:
    """Raise unless ``U M V = D`` exactly, ``D`` is a divisibility diagonal and ``det U, det V = ±1``."""
    r, c = form.rows, form.cols
    if r and c:
        prod = np.array(form.U, dtype=object).reshape(r, r) @ np.array(form.M, dtype=object).reshape(r, c)
        prod = prod @ np.array(form.V, dtype=object).reshape(c, c)
        if prod.tolist() != [list(row) for row in form.D]:
            raise AssertionError("Smith certificate fails: U M V != D")
    for i in range(r):
        for j in range(c):
            if i != j and form.D[i][j]:
                raise AssertionError("Smith form is not diagonal")
    diag = form.diagonal
    nz = [d for d in diag if d]
    if any(d < 0 for d in diag) or diag[: len(nz)] != tuple(nz):
        raise AssertionError("Smith diagonal is not normalized")
    if any(b % a for a, b in zip(nz, nz[1:])):
        raise AssertionError("Smith diagonal fails the divisibility chain")
    for T in (form.U, form.V):
        if abs(integer_determinant(T)) != 1:
            raise AssertionError("transform is not unimodular")


# ---------------------------------------------------------------------------
# presentations


def iso_classes(inst: SWInstance, bound) -> list:
    """``(label, representative)`` for each isomorphism class in the window."""
    return [(inst.iso_label(X), X) for X in inst.representatives(bound)]


@dataclass(frozen=True)
class Presentation:
    generators: tuple
    representatives: tuple
    relations: tuple
    window: str = ""

    @property
    def index(self) -> dict:
        return {g: k for k, g in enumerate(self.generators)}

    def to_json(self):
        return {
            "window": self.window,
            "generators": [to_jsonable(g) for g in self.generators],
            "relations": [list(r) for r in self.relations],
        }


def triple_row(index: dict, Y, X, D, label) -> tuple:
    row = [0] * len(index)
    for obj, coeff in ((Y, 1), (X, -1), (D, -1)):
        lab = label(obj)
        if lab not in index:
            raise StructuralError(f"object {obj!r} of a subtraction triple lies outside the window")
        row[index[lab]] += coeff
    return tuple(row)


def subtraction_triples(inst: SWInstance, bound):
    """One subtraction triple ``(X, Y, Y-X)`` per canonical subobject of each representative."""
    for Y in inst.representatives(bound):
        for c in inst.subobjects(Y):
            f = inst.subtraction(c)
            if f is None:
                raise StructuralError(f"cofibration into {Y!r} has no chosen subtraction")
            yield inst.source(c), Y, inst.source(f)


def presentation(inst: SWInstance, bound) -> Presentation:
    classes = iso_classes(inst, bound)
    gens = tuple(g for g, _ in classes)
    if len(set(gens)) != len(gens):
        raise StructuralError("isomorphism labels are not distinct across representatives")
    index = {g: k for k, g in enumerate(gens)}
    rows = {triple_row(index, Y, X, D, inst.iso_label) for X, Y, D in subtraction_triples(inst, bound)}
    return Presentation(gens, tuple(R for _, R in classes), tuple(sorted(rows)), f"{inst.name}, bound {bound}")


# ---------------------------------------------------------------------------
# the group


@dataclass
class K0Group:
    """Cokernel of a presentation with a normalized coordinate system.

    Coordinates are the torsion factors (reduced modulo ``d``) followed by
    the free part.  Free coordinates are signed so that the first generator
    with a nonzero entry there is positive.
    """

    presentation: Presentation
    snf: SmithForm
    inst: SWInstance | None = None
    _flip: list = field(default_factory=list)

    def __post_init__(self):
        diag = list(self.snf.diagonal) + [0] * (self.snf.cols - len(self.snf.diagonal))
        self._keep = [k for k, d in enumerate(diag) if d != 1]
        self._mods = [diag[k] for k in self._keep]
        self._flip = [1] * len(self._keep)
        for pos, k in enumerate(self._keep):
            if self._mods[pos] == 0:
                for g in range(self.snf.cols):
                    v = self.snf.V[g][k]
                    if v:
                        self._flip[pos] = 1 if v > 0 else -1
                        break

    @property
    def invariants(self) -> GroupInvariants:
        return self.snf.invariants

    @property
    def generators(self) -> tuple:
        return self.presentation.generators

    def reduce(self, vec: Sequence[int]) -> tuple:
        """Normalized coordinates of an integer combination of generators."""
        V = self.snf.V
        out = []
        for pos, k in enumerate(self._keep):
            x = sum(vec[g] * V[g][k] for g in range(len(vec))) * self._flip[pos]
            d = self._mods[pos]
            out.append(x % d if d else x)
        torsion = [x for x, d in zip(out, self._mods) if d]
        free = [x for x, d in zip(out, self._mods) if not d]
        return tuple(torsion + free)

    def class_of_label(self, label) -> tuple:
        idx = self.presentation.index
        if label not in idx:
            raise StructuralError(f"no generator with label {label!r}")
        vec = [0] * len(idx)
        vec[idx[label]] = 1
        return self.reduce(vec)

    def class_of(self, X) -> tuple:
        """Class of ``X``; objects beyond the window are cut by subtraction into window pieces."""
        if self.inst is None:
            raise PreconditionError("class_of needs the instance the group was built from")
        lab = self.inst.iso_label(X)
        if lab in self.presentation.index:
            return self.class_of_label(lab)
        inst = self.inst
        if isinstance(inst, ConcreteInstance) and inst.size(X) > 1:
            c = inst.sub(X, frozenset([sorted_elems(inst.carrier(X))[0]]))[1]
        else:
            subs = [c for c in inst.subobjects(X) if 0 < inst.size(inst.source(c)) < inst.size(X)]
            if not subs:
                raise StructuralError(f"{X!r} is outside the window and cannot be decomposed")
            c = subs[0]
        f = self.inst.subtraction(c)
        a, b = self.class_of(self.inst.source(c)), self.class_of(self.inst.source(f))
        return self.add(a, b)

    def add(self, a: tuple, b: tuple) -> tuple:
        tmods = [d for d in self._mods if d]
        out = []
        for k, (x, y) in enumerate(zip(a, b)):
            out.append((x + y) % tmods[k] if k < len(tmods) else x + y)
        return tuple(out)

    def scale(self, n: int, a: tuple) -> tuple:
        out = (0,) * len(a)
        for _ in range(abs(n)):
            out = self.add(out, a)
        if n < 0:
            tmods = [d for d in self._mods if d]
            out = tuple((-x) % tmods[k] if k < len(tmods) else -x for k, x in enumerate(out))
        return out

    def class_table(self) -> list:
        return [[to_jsonable(g), list(self.class_of_label(g))] for g in self.generators]

    def to_json(self):
        return {
            "window": self.presentation.window,
            "generators": [to_jsonable(g) for g in self.generators],
            "relation_count": len(self.presentation.relations),
            **self.invariants.to_json(),
            "class_table": self.class_table(),
        }


def group_of(pres: Presentation, inst: SWInstance | None = None) -> K0Group:
    return K0Group(pres, smith_normal_form(pres.relations, cols=len(pres.generators)), inst)


def k0_group(inst: SWInstance, bound) -> K0Group:
    return group_of(presentation(inst, bound), inst)


def check_class_additivity(G: K0Group, inst: SWInstance, bound) -> CheckReport:
    """``class(Y) = class(X) + class(Y-X)`` on every enumerated triple."""
    rep = CheckReport(f"class additivity on {inst.name}")
    for X, Y, D in subtraction_triples(inst, bound):
        lhs = G.class_of_label(inst.iso_label(Y))
        rhs = G.add(G.class_of_label(inst.iso_label(X)), G.class_of_label(inst.iso_label(D)))
        rep.expect(lhs == rhs, "additivity", "class of the middle term is not the sum", (X, Y, D))
    return rep.finalize()


# ---------------------------------------------------------------------------
# products


def check_biexact(inst: ConcreteInstance, bound) -> CheckReport:
    """Pushout-products of cofibrations are cofibrations and ``X x 0 = 0``."""
    rep = CheckReport(f"biexactness of the product on {inst.name}")
    objs = inst.window(bound)
    e = inst.initial
    for X in objs:
        for P in (inst.product(X, e), inst.product(e, X)):
            rep.expect(inst.size(P) == 0, "zero", "product with the initial object is not initial", X)
    cofs = [c for Y in objs for c in inst.subobjects(Y)]
    for c1, c2 in itertools.product(cofs, repeat=2):
        m = pushout_product(inst, c1, c2)
        rep.expect(m is not None and inst.is_cofibration(m), "pushout-product", "pushout-product is not a cofibration", (c1, c2))
    return rep.finalize()


def pushout_product(inst: ConcreteInstance, c1, c2):
    """``A x Y  u_{A x B}  X x B -> X x Y`` for ``c1: A -> X`` and ``c2: B -> Y``."""
    A, X, B, Y = inst.source(c1), inst.target(c1), inst.source(c2), inst.target(c2)
    left = inst.product_map(inst.identity(A), c2)  # A x B -> A x Y
    right = inst.product_map(c1, inst.identity(B))  # A x B -> X x B
    po = inst.pushout(left, right)
    a = inst.product_map(c1, inst.identity(Y))
    b = inst.product_map(inst.identity(X), c2)
    return _attempt(inst.copair, po, a, b)


@dataclass
class RingTable:
    group: K0Group
    table: dict
    report: CheckReport

    def multiply(self, a: tuple, b: tuple) -> tuple:
        """Bilinear extension of the generator table to normalized classes (free part only)."""
        G = self.group
        if G.invariants.torsion:
            raise PreconditionError("multiplication of classes is only extended for torsion-free groups")
        basis = self._free_basis()
        out = (0,) * len(a)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                if x and y:
                    out = G.add(out, G.scale(x * y, self._basis_product(basis[i], basis[j])))
        return out

    def _free_basis(self):
        # a generator label whose class is each unit vector, when one exists
        G = self.group
        found = {}
        for g in G.generators:
            v = G.class_of_label(g)
            if sum(abs(x) for x in v) == 1 and 1 in v:
                found.setdefault(v.index(1), g)
        if len(found) != G.invariants.free_rank:
            raise PreconditionError("no generator basis of unit classes")
        return [found[k] for k in range(G.invariants.free_rank)]

    def _basis_product(self, g, h):
        return self.table[(g, h)]


def k0_ring_product(inst: ConcreteInstance, bound, biexact_bound=None) -> RingTable:
    """Multiplication table of classes induced by the cartesian product.

    Refuses (raises) when the biexactness check fails.  Well-definedness is
    checked on every pair of window objects and against every relation.
    """
    bi = check_biexact(inst, bound if biexact_bound is None else biexact_bound)
    if not bi.ok:
        raise PreconditionError(f"product is not biexact: {bi.violations[0].message} at {bi.violations[0].witness!r}")
    G = k0_group(inst, bound)
    rep = CheckReport(f"product on classes of {inst.name}")
    rep.merge(bi)
    table = {}
    reps = dict(zip(G.generators, G.presentation.representatives))
    for g, h in itertools.product(G.generators, repeat=2):
        table[(g, h)] = G.class_of(inst.product(reps[g], reps[h]))
    for X, Y in itertools.product(inst.window(bound), repeat=2):
        got = G.class_of(inst.product(X, Y))
        rep.expect(got == table[(inst.iso_label(X), inst.iso_label(Y))], "well-defined",
                   "class of a product depends on the representatives", (X, Y))
    for X, Y, D in subtraction_triples(inst, bound):
        for g in G.generators:
            Z = reps[g]
            lhs = G.class_of(inst.product(Y, Z))
            rhs = G.add(G.class_of(inst.product(X, Z)), G.class_of(inst.product(D, Z)))
            rep.expect(lhs == rhs, "relations", "product does not respect a relation", (X, Y, D, Z))
    return RingTable(G, table, rep.finalize())


# ---------------------------------------------------------------------------
# additivity on classes


@dataclass
class AdditivityVerdict:
    source: GroupInvariants
    target: GroupInvariants
    homomorphism: bool
    surjective: bool
    isomorphism: bool
    induced: tuple

    def to_json(self):
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "homomorphism": self.homomorphism,
            "surjective": self.surjective,
            "isomorphism": self.isomorphism,
        }


def additivity_on_k0(inst: ConcreteInstance, bound) -> AdditivityVerdict:
    """Does ``A -> (outer left, outer right)`` induce ``K0(seq) = K0 + K0``?

    Both presentations go through Smith form.  The induced matrix sends each
    generator of the sequence group to the pair of outer classes.  Relations
    must map to zero; surjectivity is a trivial cokernel of the induced
    matrix stacked on the target relations; equal invariants plus
    surjectivity give an isomorphism since finitely generated abelian groups
    are Hopfian.
    """
    F = build_f1_plus(inst, bound)
    PC = presentation(inst, bound)
    PF = presentation(F, bound)
    n = len(PC.generators)
    idx = PC.index

    def unit(lab, shift):
        row = [0] * (2 * n)
        row[shift + idx[lab]] = 1
        return row

    induced = []
    for A in PF.representatives:
        a = unit(inst.iso_label(F.s(A)), 0)
        b = unit(inst.iso_label(F.q(A)), n)
        induced.append(tuple(x + y for x, y in zip(a, b)))
    target_rel = [tuple(r) + (0,) * n for r in PC.relations] + [(0,) * n + tuple(r) for r in PC.relations]
    target = Presentation(
        tuple(("s", g) for g in PC.generators) + tuple(("q", g) for g in PC.generators),
        PC.representatives * 2,
        tuple(target_rel),
        "pair of copies",
    )
    GT = group_of(target)
    GF = group_of(PF)

    hom = True
    for r in PF.relations:
        img = [sum(r[i] * induced[i][k] for i in range(len(r))) for k in range(2 * n)]
        if any(GT.reduce(img)):
            hom = False
            break
    stacked = smith_normal_form(list(induced) + target_rel, cols=2 * n)
    inv = stacked.invariants
    surj = inv.free_rank == 0 and not inv.torsion
    return AdditivityVerdict(GF.invariants, GT.invariants, hom, surj, hom and surj and GF.invariants == GT.invariants, tuple(induced))
