"""Set families on a finite universe: Dynkin systems, pi-systems, sigma-algebras.

Families are manipulated both as frozensets of frozensets (the public view)
and as sets of bitmasks (the closure engines), since the verification sweeps
run closures over every pi-system on small universes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional


class NotDynkin(Exception):
    pass


class InvalidResolution(Exception):
    pass


@dataclass(frozen=True)
class SetFamily:
    universe: frozenset
    members: frozenset

    @classmethod
    def of(cls, universe: Iterable, members: Iterable[Iterable]) -> "SetFamily":
        u = frozenset(universe)
        ms = frozenset(frozenset(m) for m in members)
        for m in ms:
            if not m <= u:
                raise ValueError(f"member {set(m)} escapes the universe")
        return cls(u, ms)

    def _masks(self) -> tuple[tuple, set[int]]:
        points = sorted(self.universe, key=repr)
        index = {p: i for i, p in enumerate(points)}
        masks = {sum(1 << index[p] for p in m) for m in self.members}
        return tuple(points), masks

    @classmethod
    def _from_masks(cls, points: tuple, masks: set[int]) -> "SetFamily":
        members = frozenset(
            frozenset(p for i, p in enumerate(points) if m >> i & 1) for m in masks
        )
        return cls(frozenset(points), members)


# -- mask-level engines ---------------------------------------------------------


def is_pi_system_masks(masks: set[int]) -> bool:
    if not masks:
        return False
    for a in masks:
        for b in masks:
            if a & b not in masks:
                return False
    return True


def is_dynkin_masks(n: int, masks: set[int]) -> bool:
    full = (1 << n) - 1
    if full not in masks:
        return False
    for a in masks:
        if a ^ full not in masks:
            return False
    for a in masks:
        for b in masks:
            if a & b == 0 and a | b not in masks:
                return False
    return True


def is_sigma_algebra_masks(n: int, masks: set[int]) -> bool:
    full = (1 << n) - 1
    if full not in masks:
        return False
    for a in masks:
        if a ^ full not in masks:
            return False
    for a in masks:
        for b in masks:
            if a | b not in masks:
                return False
    return True


def dynkin_closure_masks(n: int, masks: Iterable[int]) -> frozenset[int]:
    """Least family containing the universe, closed under complement and
    disjoint union (finite unions reduce to pairwise ones)."""
    full = (1 << n) - 1
    out = set(masks)
    out.add(full)
    frontier = list(out)
    while frontier:
        nxt = []
        for a in frontier:
            c = a ^ full
            if c not in out:
                out.add(c)
                nxt.append(c)
        for a in frontier:
            for b in tuple(out):
                if a & b == 0:
                    u = a | b
                    if u not in out:
                        out.add(u)
                        nxt.append(u)
        frontier = nxt
    return frozenset(out)


def sigma_closure_masks(n: int, masks: Iterable[int]) -> frozenset[int]:
    full = (1 << n) - 1
    out = set(masks)
    out.add(full)
    frontier = list(out)
    while frontier:
        nxt = []
        for a in frontier:
            c = a ^ full
            if c not in out:
                out.add(c)
                nxt.append(c)
        for a in frontier:
            for b in tuple(out):
                u = a | b
                if u not in out:
                    out.add(u)
                    nxt.append(u)
        frontier = nxt
    return frozenset(out)


# -- public wrappers --------------------------------------------------------------


def is_pi_system(F: SetFamily) -> bool:
    _, masks = F._masks()
    return is_pi_system_masks(masks)


def is_dynkin_system(F: SetFamily) -> bool:
    points, masks = F._masks()
    return is_dynkin_masks(len(points), masks)


def is_sigma_algebra(F: SetFamily) -> bool:
    points, masks = F._masks()
    return is_sigma_algebra_masks(len(points), masks)


def dynkin_closure(F: SetFamily) -> SetFamily:
    points, masks = F._masks()
    return SetFamily._from_masks(points, set(dynkin_closure_masks(len(points), masks)))


def sigma_closure(F: SetFamily) -> SetFamily:
    points, masks = F._masks()
    return SetFamily._from_masks(points, set(sigma_closure_masks(len(points), masks)))


# -- measurable step functions from set-valued resolutions -------------------------


def resolution_to_function(D: SetFamily, jumps: list[tuple[Fraction, frozenset]]):
    """Point function from a monotone chain of jump sets inside a Dynkin system.

    ``jumps`` lists (threshold, set) with strictly increasing thresholds and
    strictly increasing sets, the last being the whole universe.  The value at
    a point is the least threshold whose set contains it.  All preimages of
    unions of level fibers are verified to lie in D.
    """
    if not is_dynkin_system(D):
        raise NotDynkin("the family is not a Dynkin system")
    if not jumps:
        raise InvalidResolution("empty resolution")
    thresholds = [Fraction(t) for t, _ in jumps]
    sets = [frozenset(s) for _, s in jumps]
    if any(t1 >= t2 for t1, t2 in zip(thresholds, thresholds[1:])):
        raise InvalidResolution("thresholds must strictly increase")
    for s1, s2 in zip(sets, sets[1:]):
        if not (s1 <= s2 and s1 != s2):
            raise InvalidResolution("jump sets must strictly increase")
    if sets[-1] != D.universe:
        raise InvalidResolution("final jump set must be the whole universe")
    for s in sets:
        if s not in D.members:
            raise InvalidResolution(f"jump set {set(s)} is outside the family")

    f = {}
    for omega in D.universe:
        f[omega] = next(t for t, s in zip(thresholds, sets) if omega in s)

    # preimages of half-lines are exactly the jump sets (or empty), and every
    # preimage of a Borel set is a union of fibers; check all such unions
    fibers = []
    prev: frozenset = frozenset()
    for s in sets:
        fibers.append(s - prev)
        prev = s
    import itertools

    for k in range(len(fibers) + 1):
        for combo in itertools.combinations(fibers, k):
            union = frozenset().union(*combo) if combo else frozenset()
            if union not in D.members and union != frozenset():
                raise NotDynkin(
                    "a preimage escapes the family; the chain does not induce "
                    "an observable into it"
                )
    if frozenset() not in D.members and len(D.universe) > 0:
        # the empty set is the complement of the universe, always present
        raise NotDynkin("family misses the empty set")
    return f
