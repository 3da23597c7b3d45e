"""Compatibility theory: decompositions, blocks, Boolean covers, commutants.

A pair is compatible when it decomposes as a = a1+c, b = b1+c with a1+b1+c
summable; strongly compatible when additionally a1 and b1 meet only at 0.
Blocks are the maximal internally compatible subsets containing 1.  They are
enumerated through decompositions of 1: the subsum closure of any summable
decomposition is internally compatible (the decomposition refines it), and
conversely every internally compatible set containing 1 admits a refining
sequence whose total is 1, hence sits inside such a closure.  Maximal
closures are therefore exactly the blocks; each one is re-verified to be a
sub-effect algebra with the Riesz decomposition property.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .core import (
    UNDEF,
    EffectAlgebra,
    bits,
    is_sub_effect_algebra,
    join,
    lower_bounds,
    sum_family,
)
from . import classify
from .classify import (
    NotHomogeneous,
    SubAlgebra,
    VerificationFailed,
    restrict,
)


class SearchBudgetExceeded(Exception):
    pass


class NotOrthoalgebra(Exception):
    pass


class HypothesisFailed(Exception):
    def __init__(self, hypothesis: str):
        super().__init__(f"hypothesis not met: {hypothesis}")
        self.hypothesis = hypothesis


class EquivalenceBroken(Exception):
    pass


@dataclass(frozen=True)
class Decomposition:
    a1: int
    b1: int
    c: int


@dataclass(frozen=True)
class Block:
    members: tuple[int, ...]


def are_compatible(E: EffectAlgebra, a: int, b: int) -> Optional[Decomposition]:
    """First witness decomposition with minimal c in element order, or None."""
    table = E.table
    comp = E.order.complement
    for c in bits(lower_bounds(E, a, b)):
        a1 = comp[table[comp[a]][c]]  # a - c
        b1 = comp[table[comp[b]][c]]  # b - c
        s = table[a1][b1]
        if s != UNDEF and table[s][c] != UNDEF:
            return Decomposition(a1, b1, c)
    return None


def are_strongly_compatible(E: EffectAlgebra, a: int, b: int) -> Optional[Decomposition]:
    table = E.table
    comp = E.order.complement
    zero_mask = 1 << E.zero
    for c in bits(lower_bounds(E, a, b)):
        a1 = comp[table[comp[a]][c]]
        b1 = comp[table[comp[b]][c]]
        s = table[a1][b1]
        if s != UNDEF and table[s][c] != UNDEF and lower_bounds(E, a1, b1) == zero_mask:
            return Decomposition(a1, b1, c)
    return None


# -- refining-sequence search ----------------------------------------------------


def find_refining_sequence(
    E: EffectAlgebra,
    targets: Iterable[int],
    pool: Iterable[int],
    budget: int = 10**6,
) -> Optional[tuple[int, ...]]:
    """A summable sequence from pool expressing every target as a subsum.

    Sequences are explored as multisets with nondecreasing indices; the subsum
    set grows monotonically with each entry, so search stops as soon as all
    targets are reachable.  Raises SearchBudgetExceeded past ``budget`` nodes.
    """
    goal = 0
    for t in targets:
        if t != E.zero:
            goal |= 1 << t
    entries = sorted(set(p for p in pool if p != E.zero))
    table = E.table
    nodes = 0

    def dfs(start: int, total: int, reach: int, seq: tuple[int, ...]):
        nonlocal nodes
        if goal & ~reach == 0:
            return seq
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(f"refinement search exceeded {budget} nodes")
        for i in range(start, len(entries)):
            d = entries[i]
            nxt_total = table[total][d]
            if nxt_total == UNDEF:
                continue
            new_reach = reach
            for s in bits(reach):
                v = table[s][d]
                if v != UNDEF:
                    new_reach |= 1 << v
            if new_reach == reach:
                continue
            found = dfs(i, nxt_total, new_reach, seq + (d,))
            if found is not None:
                return found
        return None

    return dfs(0, E.zero, 1 << E.zero, ())


def is_internally_compatible(E: EffectAlgebra, members: Iterable[int],
                             budget: int = 10**6) -> bool:
    ms = tuple(members)
    return find_refining_sequence(E, ms, ms, budget) is not None


def is_compatible_set(E: EffectAlgebra, members: Iterable[int],
                      budget: int = 10**6) -> bool:
    ms = tuple(members)
    return find_refining_sequence(E, ms, E.elements, budget) is not None


# -- decompositions of an element -------------------------------------------------


def decompositions(
    E: EffectAlgebra,
    target: int,
    pool: Optional[Iterable[int]] = None,
    max_parts: Optional[int] = None,
) -> Iterator[tuple[int, ...]]:
    """Multisets of nonzero pool elements summing to target, indices nondecreasing."""
    entries = sorted(set(pool)) if pool is not None else list(E.elements)
    entries = [e for e in entries if e != E.zero]
    table = E.table
    comp = E.order.complement
    down = E.order.downset

    def dfs(remaining: int, min_idx: int, parts: tuple[int, ...]):
        if remaining == E.zero:
            yield parts
            return
        if max_parts is not None and len(parts) >= max_parts:
            return
        for i in range(min_idx, len(entries)):
            d = entries[i]
            if not (down[remaining] >> d & 1):
                continue
            rest = comp[table[comp[remaining]][d]]  # remaining - d
            yield from dfs(rest, i, parts + (d,))

    yield from dfs(target, 0, ())


def subsum_closure(E: EffectAlgebra, parts: tuple[int, ...]) -> frozenset[int]:
    """All subsums of a summable multiset (always defined)."""
    table = E.table
    reach = {E.zero}
    for d in parts:
        reach |= {table[s][d] for s in reach if table[s][d] != UNDEF}
    return frozenset(reach)


# -- blocks and Boolean covers ----------------------------------------------------


def blocks(E: EffectAlgebra) -> list[Block]:
    """Maximal internally compatible subsets containing 1, for homogeneous E."""
    if not classify.is_homogeneous(E)[0]:
        raise NotHomogeneous("blocks are only characterized for homogeneous algebras")
    closures = {subsum_closure(E, d) for d in decompositions(E, E.one)}
    maximal = [s for s in closures if not any(s < t for t in closures)]
    out = sorted(tuple(sorted(s)) for s in maximal)
    covered = set()
    for members in out:
        if not is_sub_effect_algebra(E, set(members)):
            raise VerificationFailed("block is not a sub-effect algebra")
        if not classify.has_rdp(restrict(E, members))[0]:
            raise VerificationFailed("block fails the Riesz decomposition property")
        covered.update(members)
    if covered != set(E.elements):
        raise VerificationFailed("blocks do not cover the carrier")
    return [Block(m) for m in out]


def maximal_boolean_subortho(E: EffectAlgebra) -> list[SubAlgebra]:
    """Maximal Boolean sub-orthoalgebras: subsum closures of atomic partitions of 1."""
    ortho, _ = classify.is_orthoalgebra(E)
    if not ortho:
        raise NotOrthoalgebra("Boolean cover requires an orthoalgebra")
    found = {}
    for parts in decompositions(E, E.one, pool=E.atoms):
        members = subsum_closure(E, parts)
        if len(members) != 1 << len(parts):
            raise VerificationFailed("atomic decomposition has coinciding subsums")
        found[tuple(sorted(members))] = parts
    subs = []
    for members in sorted(found):
        if not is_sub_effect_algebra(E, set(members)):
            raise VerificationFailed("Boolean cover member is not closed")
        if not classify.is_boolean_algebra(restrict(E, members)):
            raise VerificationFailed("cover member is not Boolean")
        subs.append(SubAlgebra(members, "boolean", True))
    union = {a for s in subs for a in s.members}
    if union != set(E.elements):
        raise VerificationFailed("maximal Boolean sub-orthoalgebras do not cover")
    return subs


def commutant(E: EffectAlgebra, a: int) -> SubAlgebra:
    """B(a): everything strongly compatible with a, on an orthoalgebra with RIP."""
    if not classify.is_orthoalgebra(E)[0]:
        raise HypothesisFailed("orthoalgebra")
    if not classify.has_rip(E)[0]:
        raise HypothesisFailed("rip")
    members = tuple(
        b for b in E.elements if are_strongly_compatible(E, a, b) is not None
    )
    if a not in members or E.zero not in members or E.one not in members:
        raise VerificationFailed("commutant misses 0, 1 or its base element")
    if not is_sub_effect_algebra(E, set(members)):
        raise VerificationFailed("commutant is not a sub-orthoalgebra")
    induced = restrict(E, members)
    if not classify.is_omp(induced)[0]:
        raise VerificationFailed("commutant is not an orthomodular poset")
    return SubAlgebra(members, "sub-orthoalgebra", True)


# -- the four-way compatibility equivalence ----------------------------------------


@dataclass(frozen=True)
class EquivalenceReport:
    strongly_compatible: bool
    compatible: bool
    in_observable_range: bool
    in_boolean_subalgebra: bool
    decomposition: Optional[Decomposition]

    @property
    def consistent(self) -> bool:
        return (
            self.strongly_compatible
            == self.compatible
            == self.in_observable_range
            == self.in_boolean_subalgebra
        )


def check_compat_equivalences(E: EffectAlgebra, a: int, b: int,
                              _cover=None) -> EquivalenceReport:
    """Evaluate the four equivalent characterizations on an orthoalgebra with RIP.

    Raises EquivalenceBroken if the four answers disagree; with the
    hypotheses in force a disagreement can only mean an implementation bug.
    ``_cover`` lets sweeps reuse a precomputed maximal Boolean cover.
    """
    if not classify.is_orthoalgebra(E)[0]:
        raise HypothesisFailed("orthoalgebra")
    if not classify.has_rip(E)[0]:
        raise HypothesisFailed("rip")
    from . import observables
    from .intervals import IntervalSet

    strong = are_strongly_compatible(E, a, b)
    dec = are_compatible(E, a, b)
    in_range = False
    if dec is not None:
        rest = E.order.complement[sum_family(E, (dec.a1, dec.b1, dec.c))]
        pairs = [(0, dec.a1), (1, dec.b1), (2, dec.c), (3, rest)]
        x = observables.make_observable(E, pairs)
        set_a = IntervalSet.of_points(0, 2)
        set_b = IntervalSet.of_points(1, 2)
        in_range = (
            observables.evaluate(x, set_a) == a and observables.evaluate(x, set_b) == b
        )
    cover = maximal_boolean_subortho(E) if _cover is None else _cover
    in_boolean = any(a in s.members and b in s.members for s in cover)
    report = EquivalenceReport(
        strong is not None, dec is not None, in_range, in_boolean, dec
    )
    if not report.consistent:
        raise EquivalenceBroken(
            f"clauses disagree on ({E.label(a)}, {E.label(b)}): {report}"
        )
    return report
