"""Command-line surface: .ea documents, reports, sweeps, DOT export.

Documents are line-oriented; ``;`` also separates statements and ``#`` starts
a comment.  A document either lists ``elements`` (labels, including ``0`` and
``1``) followed by sum triples ``a + b = c``, or names a generator with
``generate <expr>``.  Reports render as human text or as canonically sorted
JSON; the JSON form is byte-stable and backs the snapshot flag.

Exit codes: 0 all properties hold, 1 a violation was found, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import catalog, classify, compat, observables, states, sweeps
from .core import UNDEF, EffectAlgebra, InvalidAlgebra, validate
from .intervals import IntervalSet


class DocumentError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class UnknownLabel(DocumentError):
    pass


@dataclass(frozen=True)
class AlgebraDocument:
    name: str
    labels: tuple[str, ...]
    sums: tuple[tuple[str, str, str], ...]
    generator: Optional[str] = None


def _statements(text: str):
    """Yield (tokens, line, cols) per statement; ';' splits inside a line."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        start = 0
        for chunk in line.split(";"):
            tokens = []
            col = start
            for tok in chunk.split():
                col = line.index(tok, col)
                tokens.append((tok, col + 1))
                col += len(tok)
            if tokens:
                yield tokens, lineno
            start += len(chunk) + 1


def parse_document(text: str) -> AlgebraDocument:
    name = ""
    labels: list[str] = []
    sums: list[tuple[str, str, str]] = []
    generator = None
    for tokens, lineno in _statements(text):
        words = [t for t, _ in tokens]
        head, headcol = tokens[0]
        if head == "name":
            if len(words) != 2:
                raise DocumentError("name takes exactly one token", lineno, headcol)
            name = words[1]
        elif head == "elements":
            if len(words) < 2:
                raise DocumentError("elements needs at least one label", lineno, headcol)
            labels.extend(words[1:])
        elif head == "generate":
            generator = " ".join(words[1:])
            if not generator:
                raise DocumentError("generate needs an expression", lineno, headcol)
        elif len(words) == 5 and words[1] == "+" and words[3] == "=":
            sums.append((words[0], words[2], words[4]))
        else:
            bad = tokens[min(2, len(tokens) - 1)]
            raise DocumentError(
                f"expected 'a + b = c', 'elements', 'name' or 'generate', got {' '.join(words)!r}",
                lineno, bad[1],
            )
    if generator is None and not labels:
        raise DocumentError("document declares no elements and no generator", 1, 1)
    if generator is not None and (labels or sums):
        raise DocumentError("generator documents cannot also declare elements", 1, 1)
    if labels:
        if len(set(labels)) != len(labels):
            raise DocumentError("duplicate labels", 1, 1)
        if "0" not in labels or "1" not in labels:
            raise DocumentError("labels must include 0 and 1", 1, 1)
    return AlgebraDocument(name, tuple(labels), tuple(sums), generator)


def document_to_algebra(doc: AlgebraDocument) -> EffectAlgebra:
    if doc.generator is not None:
        try:
            return catalog.generate(catalog.parse_generator(doc.generator))
        except catalog.InvalidSpec as exc:
            raise DocumentError(str(exc), 1, 1)
    index = {lab: i for i, lab in enumerate(doc.labels)}
    n = len(doc.labels)
    zero, one = index["0"], index["1"]
    table = [[UNDEF] * n for _ in range(n)]
    for x in range(n):
        table[zero][x] = x
        table[x][zero] = x
    for la, lb, lc in doc.sums:
        for lab in (la, lb, lc):
            if lab not in index:
                raise UnknownLabel(f"unknown label {lab!r}", 1, 1)
        a, b, c = index[la], index[lb], index[lc]
        for x, y in ((a, b), (b, a)):
            if table[x][y] not in (UNDEF, c):
                raise DocumentError(
                    f"conflicting sums for {la} + {lb}", 1, 1)
            table[x][y] = c
    return validate(table, zero, one, doc.labels)


def load_algebra(source: str) -> EffectAlgebra:
    """Path to a .ea file, or an inline generator expression."""
    if os.path.exists(source):
        with open(source, "r", encoding="utf-8") as fh:
            return document_to_algebra(parse_document(fh.read()))
    return catalog.generate(catalog.parse_generator(source))


def serialize_algebra(E: EffectAlgebra, name: str = "") -> str:
    lines = []
    if name:
        lines.append(f"name {name}")
    lines.append("elements " + " ".join(E.label(a) for a in E.elements))
    for a in E.elements:
        if a == E.zero:
            continue
        for b in range(a, E.size):
            if b == E.zero:
                continue
            c = E.table[a][b]
            if c != UNDEF:
                lines.append(f"{E.label(a)} + {E.label(b)} = {E.label(c)}")
    return "\n".join(lines) + "\n"


# -- reports ------------------------------------------------------------------


@dataclass(frozen=True)
class Report:
    command: str
    payload: dict

    def render_json(self) -> str:
        doc = {"command": self.command, **self.payload}
        return json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n"

    def render_text(self) -> str:
        lines = [f"[{self.command}]"]
        for key in sorted(self.payload):
            lines.append(f"{key}: {_plain(self.payload[key])}")
        return "\n".join(lines) + "\n"


def _plain(value) -> str:
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_plain(v)}" for k, v in sorted(value.items())) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_plain(v) for v in value) + "]"
    return str(value)


def _labels(E: EffectAlgebra, items) -> list[str]:
    return [E.label(a) for a in items]


# -- command implementations -----------------------------------------------------


def _cmd_validate(E: EffectAlgebra, args) -> Report:
    return Report("validate", {
        "valid": True,
        "size": E.size,
        "zero": E.label(E.zero),
        "one": E.label(E.one),
    })


def _cmd_classify(E: EffectAlgebra, args) -> Report:
    rep = classify.classify(E)
    witnesses = {k: _labels(E, w) for k, w in rep.witnesses.items()}
    return Report("classify", {"flags": dict(rep.flags), "witnesses": witnesses})


def _cmd_sharp(E: EffectAlgebra, args) -> Report:
    sh = classify.sharp_elements(E)
    return Report("sharp", {
        "members": _labels(E, sh.members),
        "count": len(sh.members),
        "closed": sh.closed,
    })


def _cmd_skeleton(E: EffectAlgebra, args) -> Report:
    sk = classify.orthoalgebraic_skeleton(E)
    return Report("skeleton", {"members": _labels(E, sk.members), "count": len(sk.members)})


def _cmd_blocks(E: EffectAlgebra, args) -> Report:
    bls = compat.blocks(E)
    return Report("blocks", {
        "count": len(bls),
        "sizes": sorted(len(b.members) for b in bls),
        "blocks": [_labels(E, b.members) for b in bls],
    })


def _cmd_boolean_cover(E: EffectAlgebra, args) -> Report:
    cover = compat.maximal_boolean_subortho(E)
    return Report("boolean-cover", {
        "count": len(cover),
        "sizes": sorted(len(s.members) for s in cover),
        "subalgebras": [_labels(E, s.members) for s in cover],
    })


def _cmd_compat(E: EffectAlgebra, args) -> Report:
    a, b = E.index_of(args.a), E.index_of(args.b)
    dec = compat.are_compatible(E, a, b)
    strong = compat.are_strongly_compatible(E, a, b)
    payload = {
        "pair": [E.label(a), E.label(b)],
        "compatible": dec is not None,
        "strongly_compatible": strong is not None,
    }
    if dec:
        payload["decomposition"] = {
            "a1": E.label(dec.a1), "b1": E.label(dec.b1), "c": E.label(dec.c)}
    if strong:
        payload["strong_decomposition"] = {
            "a1": E.label(strong.a1), "b1": E.label(strong.b1), "c": E.label(strong.c)}
    return Report("compat", payload)


def _cmd_commutant(E: EffectAlgebra, args) -> Report:
    sub = compat.commutant(E, E.index_of(args.a))
    return Report("commutant", {
        "element": args.a,
        "members": _labels(E, sub.members),
        "count": len(sub.members),
    })


def _parse_pairs(E: EffectAlgebra, text: str) -> list[tuple[Fraction, int]]:
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise DocumentError(f"expected value:label, got {chunk!r}", 1, 1)
        value, label = chunk.split(":", 1)
        pairs.append((Fraction(value.strip()), E.index_of(label.strip())))
    return pairs


def _observable_payload(E: EffectAlgebra, x: observables.SimpleObservable) -> dict:
    return {
        "atoms": [[str(t), E.label(a)] for t, a in x.atoms],
        "spectrum": [str(t) for t in x.spectrum],
        "norm": str(x.norm),
        "is_question": observables.is_question(x),
    }


def _cmd_observable(E: EffectAlgebra, args) -> Report:
    action = args.action
    if action == "question":
        x = observables.question(E, E.index_of(args.spec))
        return Report("observable-question", _observable_payload(E, x))
    x = observables.make_observable(E, _parse_pairs(E, args.spec))
    if action == "build":
        return Report("observable-build", _observable_payload(E, x))
    if action == "roundtrip":
        sr = observables.spectral_resolution(x)
        back = observables.observable_from_resolution(E, sr)
        payload = _observable_payload(E, x)
        payload["resolution"] = [[str(t), E.label(c)] for t, c in sr.jumps]
        payload["roundtrip_identity"] = back == x
        payload["uniqueness"] = observables.uniqueness_check(E, sr)
        return Report("observable-roundtrip", payload)
    if action == "range":
        members = observables.range_members(x)
        payload = {
            "members": _labels(E, members),
            "count": len(members),
        }
        if classify.is_orthoalgebra(E)[0]:
            payload["boolean_subortho"] = observables.verify_range_boolean(x)
        return Report("observable-range", payload)
    raise DocumentError(f"unknown observable action {action!r}", 1, 1)


def _cmd_resolution(E: EffectAlgebra, args) -> Report:
    jumps = _parse_pairs(E, args.spec)
    try:
        sr = observables.check_resolution(E, jumps)
    except observables.InvalidResolution as exc:
        return Report("resolution-check", {"valid": False, "violated": exc.clause,
                                           "message": str(exc)})
    x = observables.observable_from_resolution(E, sr)
    return Report("resolution-check", {
        "valid": True,
        "observable": _observable_payload(E, x),
        "uniqueness": observables.uniqueness_check(E, sr),
    })


def _cmd_states(E: EffectAlgebra, args) -> Report:
    poly = states.state_polytope(E)
    S = poly.extreme_states
    payload = {
        "dimension": poly.dimension,
        "extreme_count": len(S),
        "extreme_states": [s.serialize(E) for s in S],
        "order_determining": states.is_order_determining(E, S)[0] if len(S) else False,
        "full": states.is_full(E, S)[0] if len(S) else False,
    }
    return Report("states", payload)


def _cmd_clan(E: EffectAlgebra, args) -> Report:
    poly = states.state_polytope(E)
    if not len(poly.extreme_states):
        return Report("clan", {"error": "empty state system"})
    ct = states.clan_embedding(E, poly.extreme_states)
    return Report("clan", {
        "states": len(poly.extreme_states),
        "clan_closed": ct.clan_closed,
        "injective": ct.is_injective,
        "order_isomorphism": ct.is_iso_onto_image,
    })


def _cmd_dot(E: EffectAlgebra, args) -> Report:
    return Report("dot", {"dot": hasse_dot(E)})


def hasse_dot(E: EffectAlgebra) -> str:
    """Hasse diagram of the derived order; sharp elements doubly circled."""
    lines = ["digraph hasse {", "  rankdir=BT;"]
    for a in E.elements:
        shape = ' peripheries=2' if classify.is_sharp(E, a) else ""
        lines.append(f'  n{a} [label="{E.label(a)}"{shape}];')
    for a in E.elements:
        for b in E.covers[a]:
            lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _cmd_sweep(args) -> tuple[Report, int]:
    result = sweeps.theorem_sweep(args.n, seed=args.seed, samples=args.samples,
                                  cap=max(args.n, catalog.ENUMERATION_CAP))
    payload = {
        "max_size": result.max_size,
        "classes": result.class_count,
        "violations": result.violations,
        "violation_count": len(result.violations),
        "observables_checked": result.observables_checked,
        "compat_gap": result.gap_witness if result.gap_witness is not None else "absent",
    }
    return Report("sweep", payload), (1 if result.violations else 0)


COMMANDS = {
    "validate": _cmd_validate,
    "classify": _cmd_classify,
    "sharp": _cmd_sharp,
    "skeleton": _cmd_skeleton,
    "blocks": _cmd_blocks,
    "boolean-cover": _cmd_boolean_cover,
    "compat": _cmd_compat,
    "commutant": _cmd_commutant,
    "observable": _cmd_observable,
    "resolution": _cmd_resolution,
    "states": _cmd_states,
    "clan": _cmd_clan,
    "dot": _cmd_dot,
}


def run(command: str, E: EffectAlgebra, args=None) -> Report:
    """Programmatic entry point used by the CLI and by tests."""
    return COMMANDS[command](E, args)


def _emit(report: Report, args) -> int:
    rendered = report.render_json() if args.format == "json" else report.render_text()
    sys.stdout.write(rendered)
    if getattr(args, "snapshot", None):
        machine = report.render_json()
        if os.path.exists(args.snapshot):
            with open(args.snapshot, "r", encoding="utf-8") as fh:
                if fh.read() != machine:
                    sys.stderr.write(f"snapshot mismatch: {args.snapshot}\n")
                    return 1
        else:
            with open(args.snapshot, "w", encoding="utf-8") as fh:
                fh.write(machine)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="effalg", description="finite effect-algebra workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, algebra=True):
        if algebra:
            p.add_argument("algebra", help=".ea file or generator expression")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--snapshot", help="write or compare the JSON rendering")

    for name in ("validate", "classify", "sharp", "skeleton", "blocks",
                 "boolean-cover", "states", "clan"):
        common(sub.add_parser(name))

    p = sub.add_parser("compat")
    common(p)
    p.add_argument("a")
    p.add_argument("b")

    p = sub.add_parser("commutant")
    common(p)
    p.add_argument("a")

    p = sub.add_parser("observable")
    common(p)
    p.add_argument("action", choices=("build", "roundtrip", "question", "range"))
    p.add_argument("spec", help="value:label pairs, or a label for question")

    p = sub.add_parser("resolution")
    common(p)
    p.add_argument("action", choices=("check",))
    p.add_argument("spec", help="threshold:label pairs")

    p = sub.add_parser("dot")
    common(p)
    p.add_argument("-o", "--output", help="write the DOT text to a file")

    p = sub.add_parser("sweep")
    p.add_argument("n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=3)
    p.add_argument("--budget", type=int, default=10**6)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--snapshot")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0

    try:
        if args.command == "sweep":
            report, code = _cmd_sweep(args)
            emit_code = _emit(report, args)
            return code or emit_code

        E = load_algebra(args.algebra)
        if args.command == "dot" and args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(hasse_dot(E))
            sys.stdout.write(f"wrote {args.output}\n")
            return 0
        report = run(args.command, E, args)
        return _emit(report, args)
    except InvalidAlgebra as exc:
        report = Report("validate", {
            "valid": False,
            "violations": [
                {"axiom": v.axiom, "witness": list(v.witness), "message": v.message}
                for v in exc.report.violations
            ],
        })
        code = _emit(report, args)
        return 1 or code
    except DocumentError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (catalog.InvalidSpec, classify.NotHomogeneous, compat.NotOrthoalgebra,
            compat.HypothesisFailed, observables.NotSummable,
            observables.DuplicateValue, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
