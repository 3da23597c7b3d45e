"""Simple observables, spectral resolutions, and range analysis.

A simple observable is a finitely supported assignment of nonzero effects to
distinct rational values whose total is 1; it acts on interval sets by
summing the effects whose value lies inside.  Its spectral resolution is the
left-continuous step chain t -> x((-inf, t)), stored as the jump list; the
two representations convert back and forth exactly.  Finitely additive and
sigma-additive observables coincide at finite spectrum, so one type serves.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from . import classify
from .classify import NotHomogeneous, SubAlgebra, VerificationFailed
from .core import UNDEF, EffectAlgebra, bits, sum_family
from .dynkin import dynkin_closure_masks, sigma_closure_masks
from .intervals import IntervalSet


class NotSummable(Exception):
    pass


class DuplicateValue(Exception):
    pass


class InvalidResolution(Exception):
    def __init__(self, clause: str, message: str):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


class UnsupportedMap(Exception):
    pass


class NotOrthoalgebra(Exception):
    pass


@dataclass(frozen=True)
class SimpleObservable:
    algebra: EffectAlgebra
    atoms: tuple[tuple[Fraction, int], ...]  # sorted by value, effects nonzero

    @property
    def spectrum(self) -> tuple[Fraction, ...]:
        return tuple(t for t, _ in self.atoms)

    @property
    def norm(self) -> Fraction:
        return max((abs(t) for t, _ in self.atoms), default=Fraction(0))

    def is_positive(self) -> bool:
        return all(t >= 0 for t in self.spectrum)

    def is_negative(self) -> bool:
        return all(t <= 0 for t in self.spectrum)

    def is_effect_observable(self) -> bool:
        return all(0 <= t <= 1 for t in self.spectrum)

    def serialize(self) -> str:
        return ",".join(f"{t}:{self.algebra.label(a)}" for t, a in self.atoms)


@dataclass(frozen=True)
class SpectralResolution:
    algebra: EffectAlgebra
    jumps: tuple[tuple[Fraction, int], ...]  # (threshold, value), ends at 1

    def value_at(self, t) -> int:
        """x((-inf, t)): the step is constant on (t_i, t_{i+1}]."""
        t = Fraction(t)
        current = self.algebra.zero
        for ti, ci in self.jumps:
            if ti < t:
                current = ci
            else:
                break
        return current

    def serialize(self) -> str:
        return ",".join(f"{t}:{self.algebra.label(c)}" for t, c in self.jumps)


def make_observable(E: EffectAlgebra, pairs: Iterable[tuple]) -> SimpleObservable:
    """Normalize (value, effect) pairs: drop zero effects, sort, check total 1."""
    seen = set()
    cleaned = []
    for t, a in pairs:
        t = Fraction(t)
        if t in seen:
            raise DuplicateValue(f"value {t} assigned twice")
        seen.add(t)
        if a != E.zero:
            cleaned.append((t, a))
    cleaned.sort()
    total = sum_family(E, (a for _, a in cleaned))
    if total != E.one:
        raise NotSummable("effects do not sum to 1")
    return SimpleObservable(E, tuple(cleaned))


def question(E: EffectAlgebra, a: int) -> SimpleObservable:
    """Two-valued observable answering `is it a`: a' at 0, a at 1."""
    return make_observable(E, [(Fraction(0), E.order.complement[a]), (Fraction(1), a)])


def evaluate(x: SimpleObservable, A: IntervalSet) -> int:
    """Sum of the atoms with value in A; a subfamily of a summable family."""
    total = sum_family(x.algebra, (a for t, a in x.atoms if A.contains(t)))
    assert total is not None, "subfamily of a summable family must be summable"
    return total


def is_question(x: SimpleObservable, verify: bool = True) -> bool:
    """Spectrum inside {0, 1}; equivalent to x squared equalling x."""
    answer = all(t in (0, 1) for t in x.spectrum)
    if verify:
        squared = power(x, 2) == x
        if squared != answer:
            raise VerificationFailed("idempotence disagrees with spectrum test")
    return answer


# -- spectral resolutions ---------------------------------------------------------


def spectral_resolution(x: SimpleObservable) -> SpectralResolution:
    """Jumps at the spectrum points; the value at each is the prefix sum."""
    E = x.algebra
    jumps = []
    acc = E.zero
    for t, a in x.atoms:
        acc = E.table[acc][a]
        jumps.append((t, acc))
    return SpectralResolution(E, tuple(jumps))


def check_resolution(E: EffectAlgebra, jumps: Sequence[tuple]) -> SpectralResolution:
    """Validate monotonicity, strict jumps, and the top ending at 1."""
    frozen = tuple((Fraction(t), c) for t, c in jumps)
    for (t1, _), (t2, _) in zip(frozen, frozen[1:]):
        if t1 >= t2:
            raise InvalidResolution("monotone", "thresholds must strictly increase")
    prev = E.zero
    for t, c in frozen:
        if c == prev:
            raise InvalidResolution("monotone", f"no jump at threshold {t}")
        if not E.leq(prev, c):
            raise InvalidResolution("monotone", "values must form an ascending chain")
        prev = c
    if frozen:
        if frozen[-1][1] != E.one:
            raise InvalidResolution("top", "final value must be 1")
    elif E.size > 1:
        raise InvalidResolution("top", "a resolution needs at least one jump")
    return SpectralResolution(E, frozen)


def observable_from_resolution(E: EffectAlgebra, sr: SpectralResolution) -> SimpleObservable:
    """Atoms are the successive differences along the jump chain.

    Differences along a chain are always summable, so the observable exists
    for every valid resolution; together with uniqueness this is the finite
    observable-existence property.
    """
    comp = E.order.complement
    pairs = []
    prev = E.zero
    for t, c in sr.jumps:
        step = comp[E.table[comp[c]][prev]]  # c - prev
        pairs.append((t, step))
        prev = c
    return make_observable(E, pairs)


def uniqueness_check(E: EffectAlgebra, sr: SpectralResolution) -> bool:
    """The resolution pins down its observable.

    Over the finite universe of jump thresholds, the half-line traces form a
    pi-system whose Dynkin closure must agree with its sigma-closure and
    exhaust the powerset; then every atom value is forced by differences of
    resolution values.  Returns False only on an implementation fault.
    """
    observable_from_resolution(E, sr)  # must exist
    m = len(sr.jumps)
    return _halfline_determination(m)


@lru_cache(maxsize=None)
def _halfline_determination(m: int) -> bool:
    if m == 0:
        return True
    halflines = {sum(1 << j for j in range(i)) for i in range(m + 1)}
    d = dynkin_closure_masks(m, halflines)
    s = sigma_closure_masks(m, halflines)
    return d == s and len(s) == 1 << m


# -- pushforward along rational maps ------------------------------------------------


@dataclass(frozen=True)
class RationalMap:
    """Piecewise polynomial with rational coefficients; pieces scanned in order."""

    pieces: tuple[tuple[IntervalSet, tuple[Fraction, ...]], ...]

    def apply(self, t: Fraction) -> Fraction:
        for domain, coeffs in self.pieces:
            if domain.contains(t):
                acc = Fraction(0)
                power_of_t = Fraction(1)
                for c in coeffs:
                    acc += c * power_of_t
                    power_of_t *= t
                return acc
        raise UnsupportedMap(f"map undefined at {t}")


def polynomial_map(*coeffs) -> RationalMap:
    """Coefficients from the constant term up."""
    cs = tuple(Fraction(c) for c in coeffs)
    return RationalMap(((IntervalSet.whole(), cs),))


def affine_map(slope, intercept) -> RationalMap:
    return polynomial_map(intercept, slope)


def indicator_map(A: IntervalSet) -> RationalMap:
    return RationalMap(((A, (Fraction(1),)), (A.complement(), (Fraction(0),))))


def compose(x: SimpleObservable, f: RationalMap) -> SimpleObservable:
    """Pushforward: atoms with equal images merge by summation."""
    if not isinstance(f, RationalMap):
        raise UnsupportedMap("only piecewise rational polynomial maps are supported")
    E = x.algebra
    grouped: dict[Fraction, list[int]] = {}
    for t, a in x.atoms:
        grouped.setdefault(f.apply(t), []).append(a)
    pairs = []
    for value in sorted(grouped):
        total = sum_family(E, grouped[value])
        assert total is not None, "merging disjoint parts of a summable family"
        pairs.append((value, total))
    return make_observable(E, pairs)


def power(x: SimpleObservable, n: int) -> SimpleObservable:
    coeffs = [Fraction(0)] * n + [Fraction(1)]
    return compose(x, polynomial_map(*coeffs))


# -- range of an observable -----------------------------------------------------------


def range_members(x: SimpleObservable) -> tuple[int, ...]:
    """All evaluations: subsums of the atom effects."""
    E = x.algebra
    reach = {E.zero}
    for _, a in x.atoms:
        reach |= {E.table[s][a] for s in reach if E.table[s][a] != UNDEF}
    return tuple(sorted(reach))


def range_subalgebra(x: SimpleObservable) -> SubAlgebra:
    return SubAlgebra(range_members(x), "range", True)


def verify_range_boolean(x: SimpleObservable) -> bool:
    """Range is a Boolean sub-orthoalgebra with RDP (guaranteed on orthoalgebras)."""
    E = x.algebra
    if not classify.is_orthoalgebra(E)[0]:
        raise NotOrthoalgebra("range verification requires an orthoalgebra")
    members = range_members(x)
    from .core import is_sub_effect_algebra

    if not is_sub_effect_algebra(E, set(members)):
        return False
    induced = classify.restrict(E, members)
    if not classify.is_omp(induced)[0]:
        return False
    if not classify.has_rdp(induced)[0]:
        return False
    return classify.is_boolean_algebra(induced)


# -- sharp observables ------------------------------------------------------------------


def is_sharp_observable(x: SimpleObservable) -> bool:
    """All range elements sharp; equivalently all resolution values sharp.

    The three characterizations (whole range, resolution at all reals,
    resolution at rationals) are evaluated separately and must agree on a
    homogeneous algebra.
    """
    E = x.algebra
    if not classify.is_homogeneous(E)[0]:
        raise NotHomogeneous("sharp-observable test requires homogeneity")
    via_range = all(classify.is_sharp(E, a) for a in range_members(x))
    sr = spectral_resolution(x)
    via_resolution = all(classify.is_sharp(E, c) for _, c in sr.jumps)
    via_rational = all(
        classify.is_sharp(E, sr.value_at(t)) for t in _rational_probes(x.spectrum)
    )
    if not (via_range == via_resolution == via_rational):
        raise VerificationFailed("sharp-observable characterizations disagree")
    return via_range


def _rational_probes(spectrum: tuple[Fraction, ...]) -> list[Fraction]:
    if not spectrum:
        return [Fraction(0)]
    probes = list(spectrum)
    probes.append(spectrum[0] - 1)
    probes.append(spectrum[-1] + 1)
    for t1, t2 in zip(spectrum, spectrum[1:]):
        probes.append((t1 + t2) / 2)
    return probes
