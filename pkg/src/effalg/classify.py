"""Structure- and element-level predicates for finite effect algebras.

All predicates are exhaustive scans with early exit; when a property fails,
the first counterexample found in a fixed scan order is reported, so repeat
runs return identical witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import (
    UNDEF,
    EffectAlgebra,
    bits,
    is_sub_effect_algebra,
    join,
    lower_bounds,
    meet,
    sub_effect_algebra_closure,
    sum_family,
    validate,
)


class NotHomogeneous(Exception):
    pass


class NotClosed(Exception):
    pass


class VerificationFailed(Exception):
    """A property the theory guarantees did not verify: implementation bug."""


@dataclass(frozen=True)
class SubAlgebra:
    members: tuple[int, ...]
    kind: str
    closed: bool = True


@dataclass(frozen=True)
class ClassificationReport:
    flags: dict[str, bool]
    witnesses: dict[str, tuple[int, ...]]

    def __getattr__(self, name):
        if name in self.flags:
            return self.flags[name]
        raise AttributeError(name)


def has_rdp(E: EffectAlgebra) -> tuple[bool, Optional[tuple[int, ...]]]:
    """Riesz decomposition: a1+a2 = b1+b2 always admits a 2x2 refinement."""
    n = E.size
    table = E.table
    sums_to: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for a in range(n):
        row = table[a]
        for b in range(n):
            if row[b] != UNDEF:
                sums_to[row[b]].append((a, b))
    for s in range(n):
        decs = sums_to[s]
        for a1, a2 in decs:
            for b1, b2 in decs:
                if not _refines(E, a1, a2, b1, b2):
                    return False, (a1, a2, b1, b2)
    return True, None


def _refines(E: EffectAlgebra, a1, a2, b1, b2) -> bool:
    table = E.table
    comp = E.order.complement
    for c11 in bits(lower_bounds(E, a1, b1)):
        c12 = comp[table[comp[a1]][c11]]  # a1 - c11
        c21 = comp[table[comp[b1]][c11]]  # b1 - c11
        if not E.leq(c21, a2):
            continue
        c22 = comp[table[comp[a2]][c21]]  # a2 - c21
        if table[c12][c22] == b2:
            return True
    return False


def has_rip(E: EffectAlgebra) -> tuple[bool, Optional[tuple[int, ...]]]:
    """Riesz interpolation: x1,x2 <= y1,y2 admits x_i <= z <= y_j.

    Only incomparable pairs matter on both sides (otherwise an endpoint
    interpolates), which keeps the scan near-quadratic in practice.
    """
    up = E.order.upset
    down = E.order.downset
    n = E.size
    for x1 in range(n):
        for x2 in range(x1 + 1, n):
            if up[x1] >> x2 & 1 or up[x2] >> x1 & 1:
                continue
            ubs = up[x1] & up[x2]
            ub_list = list(bits(ubs))
            for i, y1 in enumerate(ub_list):
                for y2 in ub_list[i + 1:]:
                    if up[y1] >> y2 & 1 or up[y2] >> y1 & 1:
                        continue
                    if not (ubs & down[y1] & down[y2]):
                        return False, (x1, x2, y1, y2)
    return True, None


def is_orthoalgebra(E: EffectAlgebra) -> tuple[bool, Optional[tuple[int, ...]]]:
    for a in E.elements:
        if a != E.zero and E.table[a][a] != UNDEF:
            return False, (a,)
    return True, None


def is_omp(E: EffectAlgebra) -> tuple[bool, Optional[tuple[int, ...]]]:
    """Orthoalgebra in which pairwise summability yields triple summability."""
    ortho, w = is_orthoalgebra(E)
    if not ortho:
        return False, w
    n = E.size
    table = E.table
    masks = [0] * n
    for a in range(n):
        row = table[a]
        m = 0
        for b in range(n):
            if row[b] != UNDEF:
                m |= 1 << b
        masks[a] = m
    for a in range(n):
        for b in bits(masks[a]):
            if b < a:
                continue
            ab = table[a][b]
            for c in bits(masks[a] & masks[b]):
                if c < b:
                    continue
                if table[ab][c] == UNDEF:
                    return False, (a, b, c)
    return True, None


def is_lattice(E: EffectAlgebra) -> tuple[bool, Optional[tuple[int, ...]]]:
    n = E.size
    for a in range(n):
        for b in range(a + 1, n):
            if join(E, a, b) is None or meet(E, a, b) is None:
                return False, (a, b)
    return True, None


def is_oml(E: EffectAlgebra) -> tuple[bool, Optional[tuple[int, ...]]]:
    omp, w = is_omp(E)
    if not omp:
        return False, w
    lat, w = is_lattice(E)
    if not lat:
        return False, w
    return True, None


def is_homogeneous(E: EffectAlgebra) -> tuple[bool, Optional[tuple[int, ...]]]:
    """a <= b+c with a <= (b+c)' always splits as a1+a2, a1 <= b, a2 <= c."""
    n = E.size
    table = E.table
    comp = E.order.complement
    down = E.order.downset
    for b in range(n):
        row = table[b]
        for c in range(b, n):
            s = row[c]
            if s == UNDEF:
                continue
            candidates = down[s] & down[comp[s]]
            for a in bits(candidates):
                if a == E.zero:
                    continue
                if not _splits(E, a, b, c):
                    return False, (a, b, c)
    return True, None


def _splits(E: EffectAlgebra, a, b, c) -> bool:
    table = E.table
    comp = E.order.complement
    for a1 in bits(lower_bounds(E, a, b)):
        a2 = comp[table[comp[a]][a1]]  # a - a1
        if E.leq(a2, c):
            return True
    return False


def classify(E: EffectAlgebra) -> ClassificationReport:
    flags: dict[str, bool] = {}
    witnesses: dict[str, tuple[int, ...]] = {}
    for name, fn in (
        ("is_lattice", is_lattice),
        ("has_rdp", has_rdp),
        ("has_rip", has_rip),
        ("is_homogeneous", is_homogeneous),
        ("is_orthoalgebra", is_orthoalgebra),
        ("is_omp", is_omp),
        ("is_oml", is_oml),
    ):
        ok, witness = fn(E)
        flags[name] = ok
        if witness is not None:
            witnesses[name] = witness
    return ClassificationReport(flags, witnesses)


# -- sharp, principal, central -------------------------------------------------


def is_sharp(E: EffectAlgebra, a: int) -> bool:
    """a and a' meet only at 0 (the meet then exists and equals 0)."""
    return lower_bounds(E, a, E.order.complement[a]) == 1 << E.zero


def sharp_elements(E: EffectAlgebra) -> SubAlgebra:
    """Sh(E); raises NotClosed when homogeneity promised closure but it failed."""
    members = tuple(a for a in E.elements if is_sharp(E, a))
    closed = is_sub_effect_algebra(E, set(members))
    if not closed and is_homogeneous(E)[0]:
        raise NotClosed("sharp elements of a homogeneous algebra must be closed")
    return SubAlgebra(members, "sub-effect-algebra" if closed else "subset", closed)


def is_principal(E: EffectAlgebra, a: int) -> bool:
    down = E.order.downset[a]
    table = E.table
    for x in bits(down):
        row = table[x]
        for y in bits(down):
            s = row[y]
            if s != UNDEF and not E.leq(s, a):
                return False
    return True


def is_central(E: EffectAlgebra, a: int) -> bool:
    """a splits the algebra: b -> (b1, b2) with b1 <= a, b2 <= a' is an
    isomorphism onto the product of the two intervals.

    Unique decomposability alone is too weak: small algebras exist where every
    element decomposes uniquely along a principal a yet the decomposition map
    fails to carry sums both ways, and the center would then not even be
    closed under addition.  The isomorphism form is the characterization the
    center theory rests on, so it is what gets checked.
    """
    table = E.table
    comp = E.order.complement
    ac = comp[a]
    f = {}
    for b in E.elements:
        decs = []
        for b1 in bits(lower_bounds(E, b, a)):
            b2 = comp[table[comp[b]][b1]]  # b - b1
            if E.leq(b2, ac):
                decs.append((b1, b2))
                if len(decs) > 1:
                    break
        if len(decs) != 1:
            return False
        f[b] = decs[0]
    for b in E.elements:
        b1, b2 = f[b]
        for c in E.elements:
            c1, c2 = f[c]
            s = table[b][c]
            s1 = table[b1][c1]
            s2 = table[b2][c2]
            product_ok = (
                s1 != UNDEF and E.leq(s1, a) and s2 != UNDEF and E.leq(s2, ac)
            )
            if (s != UNDEF) != product_ok:
                return False
            if s != UNDEF and f[s] != (s1, s2):
                return False
    return True


def central_elements(E: EffectAlgebra) -> SubAlgebra:
    """C(E): the elements splitting E as a direct product."""
    members = tuple(a for a in E.elements if is_central(E, a))
    closed = is_sub_effect_algebra(E, set(members))
    if not closed:
        raise NotClosed("central elements failed sub-effect-algebra closure")
    return SubAlgebra(members, "boolean", True)


def orthoalgebraic_skeleton(E: EffectAlgebra) -> SubAlgebra:
    """Sh(E) for homogeneous E, verified maximal among sub-orthoalgebras.

    Closure search over all generating sets of size <= 2 confirms that every
    sub-effect algebra that is an orthoalgebra in its own right and whose
    sharp elements are sharp in E sits inside Sh(E).
    """
    homog, _ = is_homogeneous(E)
    if not homog:
        raise NotHomogeneous("skeleton requires a homogeneous algebra")
    sh = sharp_elements(E)
    sh_set = set(sh.members)
    gen_sets = [()] + [(a,) for a in E.elements] + [
        (a, b) for a in E.elements for b in E.elements if a < b
    ]
    for gens in gen_sets:
        closure = sub_effect_algebra_closure(E, gens)
        if any(a != E.zero and E.table[a][a] != UNDEF for a in closure):
            continue  # not an orthoalgebra in its own right
        induced_sharp = _sharp_within(E, closure)
        if induced_sharp <= sh_set and not closure <= sh_set:
            raise VerificationFailed(
                "sub-orthoalgebra escapes the sharp elements; skeleton broken"
            )
    return SubAlgebra(sh.members, "sub-orthoalgebra", True)


def _sharp_within(E: EffectAlgebra, members: frozenset[int]) -> set[int]:
    """Elements of the induced subalgebra sharp with respect to it."""
    mask = 0
    for a in members:
        mask |= 1 << a
    comp = E.order.complement
    down = E.order.downset
    out = set()
    for a in members:
        lbs = down[a] & down[comp[a]] & mask
        if lbs == 1 << E.zero:
            out.add(a)
    return out


# -- induced substructures ------------------------------------------------------


def restrict(E: EffectAlgebra, members: tuple[int, ...]) -> EffectAlgebra:
    """The induced effect algebra on a closed subset (validated)."""
    members = tuple(sorted(members))
    if not is_sub_effect_algebra(E, set(members)):
        raise NotClosed("cannot restrict to a non-closed subset")
    index = {a: i for i, a in enumerate(members)}
    k = len(members)
    table = [[UNDEF] * k for _ in range(k)]
    for i, a in enumerate(members):
        for j, b in enumerate(members):
            c = E.table[a][b]
            if c != UNDEF:
                table[i][j] = index[c]
    labels = [E.label(a) for a in members]
    return validate(table, index[E.zero], index[E.one], labels)


def is_boolean_algebra(E: EffectAlgebra) -> bool:
    """Bounded lattice, distributive, every element complemented by its '."""
    lat, _ = is_lattice(E)
    if not lat:
        return False
    n = E.size
    jt = [[join(E, a, b) for b in range(n)] for a in range(n)]
    mt = [[meet(E, a, b) for b in range(n)] for a in range(n)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if mt[a][jt[b][c]] != jt[mt[a][b]][mt[a][c]]:
                    return False
    comp = E.order.complement
    for a in range(n):
        if mt[a][comp[a]] != E.zero or jt[a][comp[a]] != E.one:
            return False
    return True
