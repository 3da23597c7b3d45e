"""Exact-rational state theory: polytope vertices, state systems, clan tables.

A state assigns [0,1] rationals to elements, sends 1 to 1, and is additive on
defined sums.  The solution set is a polytope; its vertices (the extreme
states) are enumerated exactly: the additivity equations are eliminated first
so that a few coordinates remain free, then a double-description pass cuts
the unit box with the remaining inequalities.  Everything runs on Fractions;
no floating point enters.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .core import UNDEF, EffectAlgebra, bits
from . import classify


class EmptyStateSystem(Exception):
    pass


@dataclass(frozen=True)
class State:
    values: tuple[Fraction, ...]

    def of(self, a: int) -> Fraction:
        return self.values[a]

    def __getitem__(self, a: int) -> Fraction:
        return self.values[a]

    def serialize(self, E: EffectAlgebra) -> str:
        return ", ".join(f"{E.label(a)}: {v}" for a, v in enumerate(self.values))


@dataclass(frozen=True)
class StateSystem:
    states: tuple[State, ...]

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)


@dataclass(frozen=True)
class PolytopeResult:
    dimension: int
    extreme_states: StateSystem


# -- affine expressions over a shrinking set of free coordinates ------------------


def _const(c) -> tuple[Fraction, dict]:
    return (Fraction(c), {})


def _var(v) -> tuple[Fraction, dict]:
    return (Fraction(0), {v: Fraction(1)})


def _add(e1, e2):
    c = e1[0] + e2[0]
    d = dict(e1[1])
    for v, k in e2[1].items():
        nk = d.get(v, Fraction(0)) + k
        if nk:
            d[v] = nk
        else:
            d.pop(v, None)
    return (c, d)


def _scale(e, k):
    k = Fraction(k)
    return (e[0] * k, {v: c * k for v, c in e[1].items() if c * k})


def _sub(e1, e2):
    return _add(e1, _scale(e2, -1))


def _key(e):
    return (e[0], tuple(sorted(e[1].items())))


def _substitute(e, var, replacement):
    if var not in e[1]:
        return e
    coeff = e[1][var]
    stripped = (e[0], {v: c for v, c in e[1].items() if v != var})
    return _add(stripped, _scale(replacement, coeff))


def _solve_value_space(E: EffectAlgebra):
    """Express every element's state value over a minimal set of free coordinates.

    Returns (exprs, free) or None when the equations alone are inconsistent.
    """
    n = E.size
    cells = []
    for a in range(n):
        for b in range(a, n):
            c = E.table[a][b]
            if c != UNDEF:
                cells.append((a, b, c))
    exprs: list = [None] * n
    exprs[E.zero] = _const(0)
    exprs[E.one] = _const(1)
    free: list[int] = []
    while True:
        changed = True
        while changed:
            changed = False
            for a, b, c in cells:
                ea, eb, ec = exprs[a], exprs[b], exprs[c]
                if a == b:
                    if ea is not None and ec is None:
                        exprs[c] = _scale(ea, 2)
                        changed = True
                    elif ea is None and ec is not None:
                        exprs[a] = _scale(ec, Fraction(1, 2))
                        changed = True
                    continue
                known = (ea is not None) + (eb is not None) + (ec is not None)
                if known != 2:
                    continue
                if ec is None:
                    exprs[c] = _add(ea, eb)
                elif ea is None:
                    exprs[a] = _sub(ec, eb)
                else:
                    exprs[b] = _sub(ec, ea)
                changed = True
        missing = [e for e in range(n) if exprs[e] is None]
        if not missing:
            break
        v = missing[0]
        exprs[v] = _var(v)
        free.append(v)

    # residual relations between free coordinates
    for a, b, c in cells:
        lhs = _add(exprs[a], exprs[b]) if a != b else _scale(exprs[a], 2)
        r = _sub(lhs, exprs[c])
        if not r[1]:
            if r[0]:
                return None
            continue
        pivot = max(r[1])
        coeff = r[1][pivot]
        rest = (r[0], {v: k for v, k in r[1].items() if v != pivot})
        replacement = _scale(rest, Fraction(-1) / coeff)
        exprs = [_substitute(e, pivot, replacement) for e in exprs]
        if pivot in free:
            free.remove(pivot)
    for a, b, c in cells:
        lhs = _add(exprs[a], exprs[b]) if a != b else _scale(exprs[a], 2)
        r = _sub(lhs, exprs[c])
        if r[1] or r[0]:
            return None if not r[1] else _fail_unreduced()
    return exprs, free


def _fail_unreduced():
    raise AssertionError("equality elimination left an unreduced relation")


# -- double description over the unit box ------------------------------------------


def _vertex_enumerate(constraints: list[tuple], d: int) -> list[tuple]:
    """Vertices of {y in Q^d : const + coeffs . y >= 0 for each constraint}.

    The first 2*d constraints must be the box facets y_i >= 0, 1 - y_i >= 0.
    Incremental cutting with the standard combinatorial adjacency test.
    """
    corners = [tuple(Fraction(b) for b in bitsv) for bitsv in itertools.product((0, 1), repeat=d)]

    def evaluate(con, y):
        c, coeffs = con
        return c + sum(k * y[i] for i, k in coeffs)

    points: list[tuple] = corners
    tight: list[int] = []
    for y in points:
        mask = 0
        for k in range(2 * d):
            if evaluate(constraints[k], y) == 0:
                mask |= 1 << k
        tight.append(mask)

    for k in range(2 * d, len(constraints)):
        con = constraints[k]
        vals = [evaluate(con, y) for y in points]
        if all(v >= 0 for v in vals):
            for i, v in enumerate(vals):
                if v == 0:
                    tight[i] |= 1 << k
            continue
        keep_idx = [i for i, v in enumerate(vals) if v >= 0]
        pos_idx = [i for i, v in enumerate(vals) if v > 0]
        neg_idx = [i for i, v in enumerate(vals) if v < 0]
        new_points: dict[tuple, int] = {}
        for i in pos_idx:
            for j in neg_idx:
                common = tight[i] & tight[j]
                adjacent = True
                for l in range(len(points)):
                    if l != i and l != j and tight[l] & common == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                lam = vals[i] / (vals[i] - vals[j])
                y = tuple(a + lam * (b - a) for a, b in zip(points[i], points[j]))
                if y not in new_points:
                    mask = 0
                    for kk in range(k + 1):
                        if evaluate(constraints[kk], y) == 0:
                            mask |= 1 << kk
                    new_points[y] = mask
        points2 = [points[i] for i in keep_idx]
        tight2 = []
        for i in keep_idx:
            m = tight[i]
            if vals[i] == 0:
                m |= 1 << k
            tight2.append(m)
        for y, m in new_points.items():
            points2.append(y)
            tight2.append(m)
        points, tight = points2, tight2
        if not points:
            return []
    return sorted(set(points))


def state_polytope(E: EffectAlgebra) -> PolytopeResult:
    """Extreme states by exact vertex enumeration; may be empty."""
    solved = _solve_value_space(E)
    if solved is None:
        return PolytopeResult(-1, StateSystem(()))
    exprs, free = solved
    d = len(free)
    pos = {v: i for i, v in enumerate(free)}

    def as_constraint(e):
        coeffs = tuple(sorted((pos[v], k) for v, k in e[1].items()))
        return (e[0], coeffs)

    unique: dict = {}
    for e in exprs:
        unique.setdefault(_key(e), e)
    lower = []
    upper = []
    for key in sorted(unique):
        e = unique[key]
        if not e[1]:
            if not (0 <= e[0] <= 1):
                return PolytopeResult(-1, StateSystem(()))
            continue
        lower.append(as_constraint(e))
        upper.append(as_constraint(_sub(_const(1), e)))

    if d == 0:
        values = tuple(e[0] for e in exprs)
        return PolytopeResult(0, StateSystem((State(values),)))

    box = []
    for i, v in enumerate(free):
        box.append((Fraction(0), ((i, Fraction(1)),)))       # y_i >= 0
        box.append((Fraction(1), ((i, Fraction(-1)),)))      # y_i <= 1
    box_keys = set(box)
    rest = [c for c in lower + upper if c not in box_keys]
    rest = sorted(set(rest))
    vertices = _vertex_enumerate(box + rest, d)

    states = []
    for y in vertices:
        values = []
        for e in exprs:
            val = e[0] + sum(k * y[pos[v]] for v, k in e[1].items())
            values.append(val)
        states.append(State(tuple(values)))
    states.sort(key=lambda s: s.values)
    dimension = _affine_rank([s.values for s in states])
    return PolytopeResult(dimension, StateSystem(tuple(states)))


def _affine_rank(points: list[tuple]) -> int:
    if not points:
        return -1
    base = points[0]
    rows = [[p[i] - base[i] for i in range(len(base))] for p in points[1:]]
    rank = 0
    cols = len(base)
    r = 0
    for col in range(cols):
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][col]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][col]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                factor = rows[i][col] / pv
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


# -- state-system predicates ---------------------------------------------------------


def is_order_determining(E: EffectAlgebra, S: StateSystem):
    """(ok, witness): s(a) <= s(b) for all s must force a <= b."""
    for a in E.elements:
        for b in E.elements:
            if E.leq(a, b):
                continue
            if all(s[a] <= s[b] for s in S):
                return False, (a, b)
    return True, None


def is_full(E: EffectAlgebra, S: StateSystem):
    """(ok, witness): every nonzero a is sent to 1 by some state."""
    for a in E.elements:
        if a == E.zero:
            continue
        if not any(s[a] == 1 for s in S):
            return False, (a,)
    return True, None


@dataclass(frozen=True)
class ClanTable:
    functions: tuple[tuple[Fraction, ...], ...]  # element -> state -> value
    clan_closed: bool
    is_injective: bool
    is_iso_onto_image: bool


def clan_embedding(E: EffectAlgebra, S: StateSystem) -> ClanTable:
    """The table a -> (s(a))_s, with the clan axioms checked on the image.

    Closure under truncated addition can genuinely fail when S is not
    order-determining; the flag records the outcome rather than assuming it.
    """
    if not len(S):
        raise EmptyStateSystem("cannot embed into functions over no states")
    bar = tuple(tuple(s[a] for s in S) for a in E.elements)
    image = set(bar)
    ones = tuple(Fraction(1) for _ in range(len(S)))
    closed = ones in image
    for f in bar:
        if tuple(1 - v for v in f) not in image:
            closed = False
    for f in bar:
        for g in bar:
            if all(fv <= 1 - gv for fv, gv in zip(f, g)):
                if tuple(fv + gv for fv, gv in zip(f, g)) not in image:
                    closed = False
    injective = len(image) == E.size
    iso = injective
    if iso:
        for a in E.elements:
            for b in E.elements:
                pointwise = all(va <= vb for va, vb in zip(bar[a], bar[b]))
                if pointwise != E.leq(a, b):
                    iso = False
                    break
            if not iso:
                break
    return ClanTable(bar, closed, injective, iso)


@dataclass(frozen=True)
class FullnessImplication:
    full: bool
    orthoalgebra: bool

    @property
    def holds(self) -> bool:
        return (not self.full) or self.orthoalgebra


def check_full_implies_orthoalgebra(E: EffectAlgebra) -> FullnessImplication:
    """A full system of states forces the orthoalgebra law; evaluated on vertices.

    Fullness is a face condition, so if any state attains s(a) = 1 then some
    extreme state does; checking vertices is exact.
    """
    S = state_polytope(E).extreme_states
    full, _ = is_full(E, S)
    ortho, _ = classify.is_orthoalgebra(E)
    return FullnessImplication(full, ortho)
