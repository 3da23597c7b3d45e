"""Verification sweeps: every structural theorem checked over many algebras.

``theorem_sweep`` enumerates all isomorphism classes up to a size bound and
runs the full battery on each; violations come back as strings naming the
algebra (by size and class index) and the failed law.  The same battery backs
the command-line ``sweep`` and the acceptance suite.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import catalog, classify, compat, observables, states
from .core import UNDEF, EffectAlgebra, bits, join, sum_family


@dataclass
class SweepResult:
    max_size: int
    class_count: int
    violations: list[str]
    gap_witness: Optional[dict]
    observables_checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


IMPLICATIONS = (
    ("has_rdp", "has_rip"),
    ("has_rdp", "is_homogeneous"),
    ("is_lattice", "is_homogeneous"),
    ("is_orthoalgebra", "is_homogeneous"),
    ("is_oml", "is_omp"),
    ("is_omp", "is_orthoalgebra"),
)


def random_observable(E: EffectAlgebra, rng: random.Random) -> observables.SimpleObservable:
    """A random decomposition of 1 tagged with random distinct rational values."""
    comp = E.order.complement
    parts = []
    remaining = E.one
    while remaining != E.zero:
        below = [b for b in bits(E.order.downset[remaining]) if b != E.zero]
        d = rng.choice(below)
        parts.append(d)
        remaining = comp[E.table[comp[remaining]][d]]
    while True:
        values = {
            Fraction(rng.randint(-12, 12), rng.randint(1, 4)) for _ in parts
        }
        if len(values) == len(parts):
            break
    return observables.make_observable(E, zip(sorted(values), parts))


def check_theorems(E: EffectAlgebra, tag: str, rng: random.Random,
                   samples: int, violations: list[str]) -> tuple[int, Optional[tuple]]:
    """Run the battery on one algebra; returns (observables checked, gap pair)."""

    def fail(law: str, detail: str = "") -> None:
        violations.append(f"{tag}: {law}" + (f" ({detail})" if detail else ""))

    report = classify.classify(E)
    for premise, conclusion in IMPLICATIONS:
        if report.flags[premise] and not report.flags[conclusion]:
            fail(f"{premise} must imply {conclusion}")

    homogeneous = report.flags["is_homogeneous"]
    if homogeneous:
        try:
            sh = classify.sharp_elements(E)
        except classify.NotClosed as exc:
            fail("sharp elements closed for homogeneous algebras", str(exc))
            sh = None
        if sh is not None:
            members = set(sh.members)
            comp = E.order.complement
            if any(comp[a] not in members for a in members):
                fail("sharp set closed under complement")
            for a in members:
                for b in members:
                    c = E.table[a][b]
                    if c != UNDEF and c not in members:
                        fail("sharp set closed under defined sums")
            # chains in a finite poset contain their suprema
            for a in members:
                for b in members:
                    if E.leq(a, b) and b not in members:
                        fail("sharp set closed under chain suprema")
        try:
            blks = compat.blocks(E)
        except classify.VerificationFailed as exc:
            fail("block decomposition", str(exc))

    if report.flags["has_rdp"]:
        sh_members = set(classify.sharp_elements(E).members)
        central = set(classify.central_elements(E).members)
        if sh_members != central:
            fail("sharp elements equal central elements under RDP")

    if report.flags["is_lattice"]:
        sh_members = classify.sharp_elements(E).members
        for a in sh_members:
            for b in sh_members:
                j = join(E, a, b)
                if j is None or j not in sh_members:
                    fail("sharp set is a sub-lattice in a lattice algebra")
        induced = classify.restrict(E, sh_members)
        if not classify.is_oml(induced)[0]:
            fail("sharp elements of a lattice algebra form an OML")

    try:
        central = classify.central_elements(E)
        if not classify.is_boolean_algebra(classify.restrict(E, central.members)):
            fail("center is a Boolean algebra")
    except classify.NotClosed as exc:
        fail("center closure", str(exc))

    ortho = report.flags["is_orthoalgebra"]
    rip = report.flags["has_rip"]
    if ortho and rip:
        if not report.flags["is_omp"]:
            fail("orthoalgebra with interpolation must be an OMP")
        cover = compat.maximal_boolean_subortho(E)
        for a in E.elements:
            for b in range(a, E.size):
                try:
                    eq = compat.check_compat_equivalences(E, a, b, _cover=cover)
                except compat.EquivalenceBroken as exc:
                    fail("four-way compatibility equivalence", str(exc))
                    continue
                s = E.table[a][b]
                if s != UNDEF:
                    if not eq.strongly_compatible:
                        fail("summable pairs strongly compatible under RIP")
                    if join(E, a, b) != s:
                        fail("sum equals join for summable pairs under RIP",
                             f"{E.label(a)}+{E.label(b)}")

    impl = states.check_full_implies_orthoalgebra(E)
    if not impl.holds:
        fail("full state system forces the orthoalgebra law")

    gap = None
    for a in E.elements:
        for b in range(a, E.size):
            dec = compat.are_compatible(E, a, b)
            strong = compat.are_strongly_compatible(E, a, b)
            if strong is not None and dec is None:
                fail("strong compatibility implies compatibility")
            if dec is not None and strong is None and gap is None:
                gap = (a, b)

    checked = 0
    for _ in range(samples):
        x = random_observable(E, rng)
        sr = observables.spectral_resolution(x)
        back = observables.observable_from_resolution(E, sr)
        if back != x:
            fail("resolution round trip identity", x.serialize())
        if not observables.uniqueness_check(E, sr):
            fail("resolution determines its observable")
        checked += 1
    return checked, gap


def theorem_sweep(max_size: int, seed: int = 0, samples: int = 3,
                  cap: int = catalog.ENUMERATION_CAP) -> SweepResult:
    rng = random.Random(seed)
    result = catalog.enumerate_small(max_size, cap=cap)
    violations: list[str] = []
    gap_witness = None
    checked = 0
    index_within: dict[int, int] = {}
    for E in result.witnesses:
        idx = index_within.get(E.size, 0)
        index_within[E.size] = idx + 1
        tag = f"size{E.size}#{idx}"
        n_obs, gap = check_theorems(E, tag, rng, samples, violations)
        checked += n_obs
        if gap is not None and gap_witness is None:
            a, b = gap
            gap_witness = {
                "size": E.size,
                "class_index": idx,
                "pair": [E.label(a), E.label(b)],
                "table": [list(row) for row in E.table],
            }
    return SweepResult(max_size, len(result.witnesses), violations, gap_witness, checked)
