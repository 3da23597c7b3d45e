"""Canonical finite unions of rational-endpoint intervals.

These play the role of Borel sets at finite scale: simple observables only
ever ask whether one of finitely many rational spectrum points lies in a set,
and this class answers that exactly while staying closed under complement,
union, intersection and difference.  ``None`` endpoints stand for the two
infinities.  Canonical form: pieces sorted, pairwise disjoint, never adjacent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

Endpoint = Optional[Fraction]


@dataclass(frozen=True)
class Piece:
    lo: Endpoint
    lo_closed: bool
    hi: Endpoint
    hi_closed: bool

    def is_empty(self) -> bool:
        if self.lo is None or self.hi is None:
            return False
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)

    def contains(self, q: Fraction) -> bool:
        if self.lo is not None:
            if q < self.lo or (q == self.lo and not self.lo_closed):
                return False
        if self.hi is not None:
            if q > self.hi or (q == self.hi and not self.hi_closed):
                return False
        return True


def _lo_key(p: Piece):
    if p.lo is None:
        return (0, Fraction(0), 0)
    return (1, p.lo, 0 if p.lo_closed else 1)


def _gap_between(left: Piece, right: Piece) -> bool:
    """True when a point fits strictly between left's end and right's start."""
    if left.hi is None or right.lo is None:
        return False
    if left.hi < right.lo:
        return True
    if left.hi == right.lo:
        return not (left.hi_closed or right.lo_closed)
    return False


@dataclass(frozen=True)
class IntervalSet:
    pieces: tuple[Piece, ...]

    # -- constructors ----------------------------------------------------------

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @classmethod
    def whole(cls) -> "IntervalSet":
        return cls((Piece(None, False, None, False),))

    @classmethod
    def interval(cls, lo: Endpoint, hi: Endpoint,
                 lo_closed: bool = True, hi_closed: bool = True) -> "IntervalSet":
        lo = Fraction(lo) if lo is not None else None
        hi = Fraction(hi) if hi is not None else None
        return cls.from_pieces([Piece(lo, lo_closed if lo is not None else False,
                                      hi, hi_closed if hi is not None else False)])

    @classmethod
    def point(cls, q) -> "IntervalSet":
        q = Fraction(q)
        return cls((Piece(q, True, q, True),))

    @classmethod
    def of_points(cls, *qs) -> "IntervalSet":
        out = cls.empty()
        for q in qs:
            out = out.union(cls.point(q))
        return out

    @classmethod
    def below(cls, t) -> "IntervalSet":
        """The open ray (-inf, t)."""
        return cls.interval(None, t, hi_closed=False)

    @classmethod
    def from_pieces(cls, pieces: Iterable[Piece]) -> "IntervalSet":
        kept = sorted((p for p in pieces if not p.is_empty()), key=_lo_key)
        merged: list[Piece] = []
        for p in kept:
            if merged and not _gap_between(merged[-1], p):
                last = merged.pop()
                hi, hc = _max_hi(last, p)
                merged.append(Piece(last.lo, last.lo_closed, hi, hc))
            else:
                merged.append(p)
        return cls(tuple(merged))

    # -- queries ----------------------------------------------------------------

    def contains(self, q) -> bool:
        q = Fraction(q)
        return any(p.contains(q) for p in self.pieces)

    def is_empty(self) -> bool:
        return not self.pieces

    # -- boolean algebra ----------------------------------------------------------

    def complement(self) -> "IntervalSet":
        out: list[Piece] = []
        lo: Endpoint = None
        lo_closed = False
        for p in self.pieces:
            hi, hi_closed = p.lo, p.lo is not None and not p.lo_closed
            candidate = Piece(lo, lo_closed, hi, hi_closed)
            if hi is None:
                # current piece starts at -inf: nothing before it
                pass
            elif not candidate.is_empty():
                out.append(candidate)
            lo = p.hi
            lo_closed = p.hi is not None and not p.hi_closed
            if lo is None:
                return IntervalSet.from_pieces(out)
        out.append(Piece(lo, lo_closed, None, False))
        return IntervalSet.from_pieces(out)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet.from_pieces(self.pieces + other.pieces)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for p in self.pieces:
            for q in other.pieces:
                lo, lc = _max_lo(p, q)
                hi, hc = _min_hi(p, q)
                piece = Piece(lo, lc, hi, hc)
                if not piece.is_empty():
                    out.append(piece)
        return IntervalSet.from_pieces(out)

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersection(other.complement())

    # -- rendering ----------------------------------------------------------------

    def to_text(self) -> str:
        if not self.pieces:
            return "{}"
        parts = []
        for p in self.pieces:
            lo = "-inf" if p.lo is None else str(p.lo)
            hi = "inf" if p.hi is None else str(p.hi)
            lb = "[" if p.lo_closed else "("
            rb = "]" if p.hi_closed else ")"
            parts.append(f"{lb}{lo},{hi}{rb}")
        return " U ".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "IntervalSet":
        text = text.strip()
        if text in ("{}", "", "empty"):
            return cls.empty()
        pieces = []
        for chunk in text.replace(" u ", " U ").split(" U "):
            chunk = chunk.strip()
            if not chunk:
                continue
            if chunk[0] not in "([" or chunk[-1] not in ")]":
                raise ValueError(f"malformed interval {chunk!r}")
            lo_closed = chunk[0] == "["
            hi_closed = chunk[-1] == "]"
            body = chunk[1:-1]
            if "," not in body:
                raise ValueError(f"malformed interval {chunk!r}")
            lo_text, hi_text = (s.strip() for s in body.split(",", 1))
            lo = None if lo_text in ("-inf", "-oo") else Fraction(lo_text)
            hi = None if hi_text in ("inf", "+inf", "oo", "+oo") else Fraction(hi_text)
            if lo is None:
                lo_closed = False
            if hi is None:
                hi_closed = False
            pieces.append(Piece(lo, lo_closed, hi, hi_closed))
        return cls.from_pieces(pieces)


def _max_lo(p: Piece, q: Piece):
    if p.lo is None:
        return q.lo, q.lo_closed
    if q.lo is None:
        return p.lo, p.lo_closed
    if p.lo > q.lo:
        return p.lo, p.lo_closed
    if q.lo > p.lo:
        return q.lo, q.lo_closed
    return p.lo, p.lo_closed and q.lo_closed


def _min_hi(p: Piece, q: Piece):
    if p.hi is None:
        return q.hi, q.hi_closed
    if q.hi is None:
        return p.hi, p.hi_closed
    if p.hi < q.hi:
        return p.hi, p.hi_closed
    if q.hi < p.hi:
        return q.hi, q.hi_closed
    return p.hi, p.hi_closed and q.hi_closed


def _max_hi(p: Piece, q: Piece):
    if p.hi is None or q.hi is None:
        return None, False
    if p.hi > q.hi:
        return p.hi, p.hi_closed
    if q.hi > p.hi:
        return q.hi, q.hi_closed
    return p.hi, p.hi_closed or q.hi_closed
