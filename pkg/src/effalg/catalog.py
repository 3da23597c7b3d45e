"""Generators for named finite effect algebras and a small-model enumerator.

Every generator builds a raw sum table and pushes it through ``core.validate``;
constructions are certified, never trusted.  The enumerator produces one
canonical representative per isomorphism class, where the canonical form is
the lexicographically minimal sum table over all carrier permutations fixing
the bottom and top elements (undefined entries sort after element indices).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .core import (
    UNDEF,
    EffectAlgebra,
    check_table,
    validate,
)


class InvalidSpec(Exception):
    pass


class CapExceeded(Exception):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    """Description of a named construction.

    kind is one of boolean, mvchain, fano, evenomp, hsum, product, raw;
    ``arg`` carries the numeric parameter, ``parts`` the sub-specs of a
    horizontal sum or product, ``raw`` a literal (table, zero, one, labels).
    """

    kind: str
    arg: Optional[int] = None
    parts: tuple["GeneratorSpec", ...] = ()
    raw: Optional[tuple] = None

    def describe(self) -> str:
        if self.kind in ("boolean", "mvchain", "evenomp"):
            return f"{self.kind} {self.arg}"
        if self.kind == "fano":
            return "fano"
        if self.kind in ("hsum", "product"):
            inner = " ".join(f"({p.describe()})" for p in self.parts)
            return f"{self.kind} {inner}"
        return "raw"


def boolean(n: int) -> GeneratorSpec:
    return GeneratorSpec("boolean", arg=n)


def mv_chain(n: int) -> GeneratorSpec:
    return GeneratorSpec("mvchain", arg=n)


def fano_plane() -> GeneratorSpec:
    return GeneratorSpec("fano")


def even_subset_omp(m: int) -> GeneratorSpec:
    return GeneratorSpec("evenomp", arg=m)


def horizontal_sum(*parts: GeneratorSpec) -> GeneratorSpec:
    return GeneratorSpec("hsum", parts=tuple(parts))


def product(*parts: GeneratorSpec) -> GeneratorSpec:
    return GeneratorSpec("product", parts=tuple(parts))


def raw(table: Sequence[Sequence[int]], zero: int, one: int,
        labels: Sequence[str] = ()) -> GeneratorSpec:
    frozen = (tuple(tuple(r) for r in table), zero, one, tuple(labels))
    return GeneratorSpec("raw", raw=frozen)


# -- individual constructions -------------------------------------------------


def _subset_label(mask: int) -> str:
    members = [str(i + 1) for i in range(mask.bit_length()) if mask >> i & 1]
    return "{" + ",".join(members) + "}"


def _build_boolean(n: int) -> EffectAlgebra:
    if n < 0:
        raise InvalidSpec("boolean(n) needs n >= 0")
    size = 1 << n
    full = size - 1
    table = [[UNDEF] * size for _ in range(size)]
    for a in range(size):
        for b in range(size):
            if a & b == 0:
                table[a][b] = a | b
    labels = ["0"] + [_subset_label(m) for m in range(1, full)] + (["1"] if n else [])
    if n == 0:
        labels = ["0"]
    return validate(table, 0, full, labels)


def _build_mv_chain(n: int) -> EffectAlgebra:
    if n < 1:
        raise InvalidSpec("mvchain(n) needs n >= 1")
    size = n + 1
    table = [[UNDEF] * size for _ in range(size)]
    for a in range(size):
        for b in range(size):
            if a + b <= n:
                table[a][b] = a + b
    labels = ["0"] + [f"{k}/{n}" for k in range(1, n)] + ["1"]
    return validate(table, 0, n, labels)


FANO_LINES = (
    (1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 5, 6),
)


def _build_fano() -> EffectAlgebra:
    # Carrier: 0, seven atoms (one per point), seven coatoms (complements of
    # the atoms, each realized as the sum of the other two points of any line
    # through it), 1.  Unique complementation forces the identification of the
    # pair-sums taken in different lines, so the carrier has 16 elements.
    third = {}
    for line in FANO_LINES:
        for p, q in itertools.permutations(line, 2):
            third[(p, q)] = next(r for r in line if r not in (p, q))
    size = 16
    zero, one = 0, 15
    atom = lambda p: p           # points 1..7 at indices 1..7
    coatom = lambda p: 7 + p     # complements at indices 8..14
    table = [[UNDEF] * size for _ in range(size)]
    for x in range(size):
        table[0][x] = x
        table[x][0] = x
    for p in range(1, 8):
        table[atom(p)][coatom(p)] = one
        table[coatom(p)][atom(p)] = one
        for q in range(1, 8):
            if p != q:
                r = third[(p, q)]
                table[atom(p)][atom(q)] = coatom(r)
    labels = ["0"] + [f"p{p}" for p in range(1, 8)] + [f"p{p}'" for p in range(1, 8)] + ["1"]
    return validate(table, zero, one, labels)


def _build_even_omp(m: int) -> EffectAlgebra:
    if m < 2 or m % 2:
        raise InvalidSpec("evenomp(m) needs even m >= 2")
    masks = [x for x in range(1 << m) if bin(x).count("1") % 2 == 0]

    def members(mask):
        return tuple(i + 1 for i in range(m) if mask >> i & 1)

    masks.sort(key=lambda x: (bin(x).count("1"), members(x)))
    index = {x: i for i, x in enumerate(masks)}
    size = len(masks)
    table = [[UNDEF] * size for _ in range(size)]
    for i, a in enumerate(masks):
        for j, b in enumerate(masks):
            if a & b == 0:
                table[i][j] = index[a | b]
    labels = ["0"] + [_subset_label(x) for x in masks[1:-1]] + ["1"]
    return validate(table, 0, size - 1, labels)


def _build_product(parts: Sequence[EffectAlgebra]) -> EffectAlgebra:
    if not parts:
        return validate([[0]], 0, 0, ["0"])
    points = list(itertools.product(*(range(p.size) for p in parts)))
    index = {pt: i for i, pt in enumerate(points)}
    size = len(points)
    table = [[UNDEF] * size for _ in range(size)]
    for i, u in enumerate(points):
        for j, v in enumerate(points):
            comps = tuple(p.table[x][y] for p, x, y in zip(parts, u, v))
            if UNDEF not in comps:
                table[i][j] = index[comps]
    zero = index[tuple(p.zero for p in parts)]
    one = index[tuple(p.one for p in parts)]
    labels = []
    for pt in points:
        if pt == points[zero]:
            labels.append("0")
        elif pt == points[one]:
            labels.append("1")
        else:
            labels.append("(" + ",".join(p.label(x) for p, x in zip(parts, pt)) + ")")
    return validate(table, zero, one, labels)


def _build_horizontal_sum(parts: Sequence[EffectAlgebra]) -> EffectAlgebra:
    if not parts:
        raise InvalidSpec("horizontal sum needs at least one summand")
    for p in parts:
        if p.size < 2:
            raise InvalidSpec("horizontal sum summands need size >= 2")
    if len(parts) == 1:
        return parts[0]
    # Carrier: shared 0 and 1 plus the disjoint interiors of the summands.
    size = 2 + sum(p.size - 2 for p in parts)
    zero, one = 0, size - 1
    local = {}  # (summand, element) -> global index
    labels = ["0"] * size
    labels[one] = "1"
    nxt = 1
    prefix = [chr(ord("A") + i) for i in range(len(parts))]
    for i, p in enumerate(parts):
        for e in range(p.size):
            if e == p.zero:
                local[(i, e)] = zero
            elif e == p.one:
                local[(i, e)] = one
            else:
                local[(i, e)] = nxt
                labels[nxt] = f"{prefix[i]}.{p.label(e)}"
                nxt += 1
    table = [[UNDEF] * size for _ in range(size)]
    for x in range(size):
        table[zero][x] = x
        table[x][zero] = x
    for i, p in enumerate(parts):
        for a in range(p.size):
            for b in range(p.size):
                c = p.table[a][b]
                if c == UNDEF:
                    continue
                ga, gb, gc = local[(i, a)], local[(i, b)], local[(i, c)]
                if table[ga][gb] == UNDEF:
                    table[ga][gb] = gc
    return validate(table, zero, one, labels)


@lru_cache(maxsize=None)
def generate(spec: GeneratorSpec) -> EffectAlgebra:
    """Build and validate the algebra described by the spec."""
    if spec.kind == "boolean":
        return _build_boolean(spec.arg)
    if spec.kind == "mvchain":
        return _build_mv_chain(spec.arg)
    if spec.kind == "fano":
        return _build_fano()
    if spec.kind == "evenomp":
        return _build_even_omp(spec.arg)
    if spec.kind == "product":
        return _build_product([generate(p) for p in spec.parts])
    if spec.kind == "hsum":
        return _build_horizontal_sum([generate(p) for p in spec.parts])
    if spec.kind == "raw":
        table, zero, one, labels = spec.raw
        return validate(table, zero, one, labels)
    raise InvalidSpec(f"unknown generator kind {spec.kind!r}")


# -- generator expression syntax ----------------------------------------------


def _tokenize_gen(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse_generator(text: str) -> GeneratorSpec:
    """Parse expressions like ``boolean 3`` or ``hsum (boolean 2) (mvchain 2)``."""
    tokens = _tokenize_gen(text)
    spec, rest = _parse_gen_tokens(tokens)
    if rest:
        raise InvalidSpec(f"trailing tokens {rest!r} in generator expression")
    return spec


def _parse_gen_tokens(tokens: list[str]) -> tuple[GeneratorSpec, list[str]]:
    if not tokens:
        raise InvalidSpec("empty generator expression")
    head, rest = tokens[0], tokens[1:]
    if head == "fano":
        return GeneratorSpec("fano"), rest
    if head in ("boolean", "mvchain", "evenomp"):
        if not rest or not rest[0].lstrip("-").isdigit():
            raise InvalidSpec(f"{head} needs an integer argument")
        return GeneratorSpec(head, arg=int(rest[0])), rest[1:]
    if head in ("hsum", "product"):
        parts = []
        while rest and rest[0] == "(":
            depth, j = 1, 1
            while j < len(rest) and depth:
                depth += rest[j] == "("
                depth -= rest[j] == ")"
                j += 1
            if depth:
                raise InvalidSpec("unbalanced parentheses in generator expression")
            inner, tail = _parse_gen_tokens(rest[1:j - 1])
            if tail:
                raise InvalidSpec(f"trailing tokens inside parentheses: {tail!r}")
            parts.append(inner)
            rest = rest[j:]
        if not parts:
            raise InvalidSpec(f"{head} needs parenthesized sub-specs")
        return GeneratorSpec(head, parts=tuple(parts)), rest
    raise InvalidSpec(f"unknown generator {head!r}")


# -- the standard desk-scale collection ---------------------------------------


@lru_cache(maxsize=1)
def standard() -> dict[str, EffectAlgebra]:
    """The fixture algebras the verification sweeps run over."""
    specs = {
        "boolean1": boolean(1),
        "boolean2": boolean(2),
        "boolean3": boolean(3),
        "boolean4": boolean(4),
        "mvchain2": mv_chain(2),
        "mvchain3": mv_chain(3),
        "mvchain4": mv_chain(4),
        "mvchain5": mv_chain(5),
        "fano": fano_plane(),
        "evenomp4": even_subset_omp(4),
        "evenomp6": even_subset_omp(6),
        "evenomp8": even_subset_omp(8),
        "hsum_b2_b2": horizontal_sum(boolean(2), boolean(2)),
        "hsum_b2_b2_b2": horizontal_sum(boolean(2), boolean(2), boolean(2)),
        "hsum_b2_mv2": horizontal_sum(boolean(2), mv_chain(2)),
        "product_mv2_mv2": product(mv_chain(2), mv_chain(2)),
    }
    return {name: generate(spec) for name, spec in specs.items()}


# -- enumeration of all small effect algebras ---------------------------------


@dataclass(frozen=True)
class EnumerationResult:
    count_by_size: dict[int, int]
    witnesses: tuple[EffectAlgebra, ...]


ENUMERATION_CAP = 8


def _involutions(interior: int) -> Iterator[tuple[int, ...]]:
    """Canonical complement patterns on interior indices 1..interior.

    Fixed points occupy the lowest indices, the rest pair consecutively; any
    involution is conjugate to exactly one such pattern, so no isomorphism
    class is lost and no two patterns share a class (the number of fixed
    points is invariant).
    """
    for fixed in range(interior % 2, interior + 1, 2):
        comp = list(range(interior + 2))
        for i in range(fixed + 1, interior + 1, 2):
            comp[i], comp[i + 1] = i + 1, i
        yield tuple(comp)


def _enumerate_tables(n: int) -> list[tuple[tuple[int, ...], ...]]:
    """All effect-algebra tables on 0..n-1 with zero=0, one=n-1, canonical."""
    if n == 2:
        return [((0, 1), (1, UNDEF))]
    one = n - 1
    interior = n - 2
    canon: set[tuple[tuple[int, ...], ...]] = set()
    for comp_interior in _involutions(interior):
        comp = list(comp_interior)
        comp[0] = one
        comp[one] = 0
        base = [[None] * n for _ in range(n)]
        for x in range(n):
            base[0][x] = x
            base[x][0] = x
        for x in range(1, n):
            if x != one:
                base[one][x] = UNDEF
                base[x][one] = UNDEF
        base[0][one] = one
        base[one][0] = one
        base[one][one] = UNDEF
        ok = True
        for a in range(1, n):
            b = comp[a]
            if base[a][b] is None:
                base[a][b] = one
                base[b][a] = one
            elif base[a][b] != one:
                ok = False
        if not ok:
            continue
        cells = [
            (a, b)
            for a in range(1, one)
            for b in range(a, one)
            if base[a][b] is None
        ]
        for table in _search_tables(n, comp, base, cells):
            canon.add(_canonical_table(table, n))
    return sorted(canon)


def _search_tables(n, comp, base, cells) -> Iterator[tuple[tuple[int, ...], ...]]:
    one = n - 1
    table = [row[:] for row in base]
    row_used = [set() for _ in range(n)]
    for a in range(n):
        for b in range(n):
            v = table[a][b]
            if v is not None and v != UNDEF:
                row_used[a].add(v)

    def assign(a, b, v, trail) -> bool:
        cur = table[a][b]
        if cur is not None:
            return cur == v
        if v != UNDEF:
            # cancellativity: each row takes every value at most once
            if v in row_used[a] or (a != b and v in row_used[b]):
                return False
            if v == one and b != comp[a]:
                return False
            if v in (0, a, b):
                return False
        table[a][b] = v
        table[b][a] = v
        trail.append((a, b))
        if v != UNDEF:
            row_used[a].add(v)
            if a != b:
                row_used[b].add(v)
            # a+b=c forces b+c'=a' and a+c'=b'
            if not assign(b, comp[v], comp[a], trail):
                return False
            if not assign(a, comp[v], comp[b], trail):
                return False
        return True

    def undo(trail, mark):
        while len(trail) > mark:
            a, b = trail.pop()
            v = table[a][b]
            if v is not None and v != UNDEF:
                row_used[a].discard(v)
                if a != b:
                    row_used[b].discard(v)
            table[a][b] = None
            table[b][a] = None

    def solve(idx) -> Iterator[tuple[tuple[int, ...], ...]]:
        while idx < len(cells) and table[cells[idx][0]][cells[idx][1]] is not None:
            idx += 1
        if idx == len(cells):
            final = tuple(tuple(row) for row in table)
            if check_table(final, 0, one).ok:
                yield final
            return
        a, b = cells[idx]
        options = [UNDEF] + [c for c in range(1, one) if c not in (a, b)]
        for v in options:
            trail: list = []
            if assign(a, b, v, trail):
                yield from solve(idx + 1)
            undo(trail, 0)

    yield from solve(0)


def _canonical_table(table, n) -> tuple[tuple[int, ...], ...]:
    """Lexicographically minimal relabeling over permutations fixing 0, 1.

    Interior elements are first partitioned by a relabeling-invariant key;
    the classes receive consecutive position blocks in key order, and only
    the arrangements within each block are tried.  Isomorphic tables share
    the key multiset, hence the same blocks, so they reach the same minimum.
    """
    one = n - 1
    interior = list(range(1, one))
    if not interior:
        return tuple(tuple(row) for row in table)

    def invariant(a):
        row = table[a]
        defined = sum(1 for v in row if v != UNDEF)
        return (defined, table[a][a] == one, table[a][a] != UNDEF)

    groups: dict[tuple, list[int]] = {}
    for a in interior:
        groups.setdefault(invariant(a), []).append(a)
    blocks = []
    slot = 1
    for key in sorted(groups):
        members = groups[key]
        blocks.append((members, list(range(slot, slot + len(members)))))
        slot += len(members)

    best = None
    for parts in itertools.product(*(itertools.permutations(m) for m, _ in blocks)):
        perm = list(range(n))
        for (members, slots), arrangement in zip(blocks, parts):
            for elem, s in zip(arrangement, slots):
                perm[elem] = s
        inv = _inverse_order(perm, n)
        flat = tuple(
            tuple(n if table[a][b] == UNDEF else perm[table[a][b]] for b in inv)
            for a in inv
        )
        if best is None or flat < best:
            best = flat
    return tuple(tuple(UNDEF if v == n else v for v in row) for row in best)


def _inverse_order(perm, n):
    inv = [0] * n
    for old, new in enumerate(perm):
        inv[new] = old
    return inv


@lru_cache(maxsize=None)
def _classes_of_size(n: int) -> tuple[EffectAlgebra, ...]:
    out = []
    for i, t in enumerate(_enumerate_tables(n)):
        labels = ["0"] + [f"x{a}" for a in range(1, n - 1)] + ["1"]
        out.append(validate(t, 0, n - 1, labels))
    return tuple(out)


def enumerate_small(
    max_size: int,
    predicate: Optional[Callable[[EffectAlgebra], bool]] = None,
    cap: int = ENUMERATION_CAP,
) -> EnumerationResult:
    """One representative per isomorphism class with 2 <= size <= max_size.

    The degenerate one-element algebra is excluded.  ``predicate`` filters
    classes after canonical deduplication.
    """
    if max_size > cap:
        raise CapExceeded(f"max_size {max_size} exceeds cap {cap}")
    counts: dict[int, int] = {}
    witnesses: list[EffectAlgebra] = []
    for n in range(2, max_size + 1):
        kept = [E for E in _classes_of_size(n) if predicate is None or predicate(E)]
        counts[n] = len(kept)
        witnesses.extend(kept)
    return EnumerationResult(counts, tuple(witnesses))
