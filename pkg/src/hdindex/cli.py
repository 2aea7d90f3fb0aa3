"""Command-line front end.

Verbs map one-to-one onto the library operations:

    validate      parse a diagram and report invariant violations
    info          genus, region census, full-surface class summary
    generators    enumerate the generators
    domains       enumerate connecting domains inside a coefficient box
    index         the index quantities of one (domain, x, y) triple
    build-surface run the construction and report the surface census
    stabilize     the stabilized construction plus its cover bookkeeping
    check         run every verification suite

Exit codes: 0 success, 1 parse or validation error, 2 precondition
violation, 3 suite failure.  ``--json`` switches every verb to a stable
machine-readable record (fixed key order, rationals in lowest terms).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from hdindex.diagram import DiagramError, HeegaardDiagram, parse_diagram, validate_diagram
from hdindex.domains import (
    Domain,
    Generator,
    enumerate_generators,
    find_domains,
    periodic_domain_basis,
    sigma_class,
)
from hdindex.formulas import euler_measure, index_report
from hdindex.builder import (
    PreconditionError,
    branched_cover_check,
    build_surface,
    stabilized_surface,
)
from hdindex import harness

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_PRECONDITION = 2
EXIT_SUITE = 3


def _load(path: str, require_valid: bool = True) -> HeegaardDiagram:
    text = Path(path).read_text(encoding="utf-8")
    d = parse_diagram(text)
    if require_valid:
        bad = validate_diagram(d)
        if bad:
            raise DiagramError(
                "invalid diagram: " + "; ".join(v.message for v in bad)
            )
    return d


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _cmd_validate(args) -> int:
    d = _load(args.diagram, require_valid=False)
    report = validate_diagram(d)
    payload = {
        "valid": not report,
        "violations": [{"code": v.code, "message": v.message} for v in report],
    }
    lines = ["valid"] if not report else [f"{v.code}: {v.message}" for v in report]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if not report else EXIT_INPUT


def _cmd_info(args) -> int:
    d = _load(args.diagram)
    sigma = sigma_class(d)
    payload = {
        "genus": d.genus,
        "vertices": len(d.vertices),
        "regions": [
            {"id": r.name, "corners": r.corner_count} for r in d.regions
        ],
        "euler_measure_sigma": str(euler_measure(d, sigma)),
        "periodic_rank": len(periodic_domain_basis(d)),
    }
    text = (
        f"genus {d.genus}, {len(d.vertices)} crossings, "
        f"{len(d.regions)} regions {d.region_census()}\n"
        f"e(full surface class) = {euler_measure(d, sigma)}\n"
        f"periodic domain rank = {len(periodic_domain_basis(d))}"
    )
    _emit(args, payload, text)
    return EXIT_OK


def _cmd_generators(args) -> int:
    d = _load(args.diagram)
    gens = enumerate_generators(d)
    payload = {"count": len(gens), "generators": [g.format() for g in gens]}
    _emit(args, payload, "\n".join(g.format() for g in gens))
    return EXIT_OK


def _cmd_domains(args) -> int:
    d = _load(args.diagram)
    x = Generator.parse(d, args.from_)
    y = Generator.parse(d, args.to)
    doms = find_domains(d, x, y, args.max_coeff, args.positive)
    payload = {"count": len(doms), "domains": [a.format() for a in doms]}
    _emit(args, payload, "\n".join(a.format() for a in doms))
    return EXIT_OK


def _cmd_index(args) -> int:
    d = _load(args.diagram)
    x = Generator.parse(d, args.from_)
    y = Generator.parse(d, args.to)
    a = Domain.parse(d, args.domain)
    rep = index_report(d, a, x, y, force=args.force)
    _emit(args, rep.as_dict(), rep.as_text())
    return EXIT_OK


def _cmd_build_surface(args) -> int:
    d = _load(args.diagram)
    x = Generator.parse(d, args.from_)
    y = Generator.parse(d, args.to)
    a = Domain.parse(d, args.domain)
    s3 = build_surface(d, a, x, y)
    payload = s3.to_json_dict()
    text = "\n".join(
        [
            f"stage {payload['stage']}  chi = {payload['chi']}  "
            f"delta = {payload['delta']}",
            f"corners: {', '.join(c['vertex'] for c in payload['corners'])}",
            f"degenerate disks: {payload['degenerate_disks']}",
            f"boundary branch points: {payload['branch_marks']}",
            f"pushforward: {payload['pushforward']}",
        ]
    )
    _emit(args, payload, text)
    return EXIT_OK


def _cmd_stabilize(args) -> int:
    d = _load(args.diagram)
    x = Generator.parse(d, args.from_)
    y = Generator.parse(d, args.to)
    a = Domain.parse(d, args.domain)
    s4 = stabilized_surface(d, a, x, y)
    check = branched_cover_check(s4)
    payload = dict(s4.to_json_dict(), cover_check=check)
    text = "\n".join(
        [
            f"stage S4  chi = {s4.chi}  connected = {check['connected']}",
            f"corners: {', '.join(c['vertex'] for c in payload['corners'])}",
            f"corner halves per boundary component: "
            f"{', '.join(check['corner_halves'])} (sum {check['corner_halves_sum']})",
            f"branch budget: {check['branch_budget']}",
            f"pushforward: {payload['pushforward']}",
            f"cover bookkeeping: {'ok' if check['ok'] else 'VIOLATED'}",
        ]
    )
    _emit(args, payload, text)
    return EXIT_OK if check["ok"] else EXIT_SUITE


def _cmd_check(args) -> int:
    if args.corpus:
        diagrams = {}
        for path in sorted(Path(args.corpus).glob("*.hd")):
            diagrams[path.name] = _load(str(path), require_valid=False)
    else:
        diagrams = harness.bundled_corpus()
    results = harness.run_all(
        diagrams,
        pattern_bound=args.pattern_bound,
        max_coeff=args.max_coeff,
        k_max=args.k_max,
    )
    payload = {"suites": [r.as_dict() for r in results]}
    _emit(args, payload, harness.format_results(results))
    return EXIT_OK if all(r.ok for r in results) else EXIT_SUITE


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hdindex",
        description="Exact index quantities and surface constructions "
        "for combinatorial Heegaard diagrams.",
    )
    p.add_argument("--json", action="store_true", help="emit JSON records")
    sub = p.add_subparsers(dest="verb", required=True)

    def diagram_verb(name, fn, **kwargs):
        q = sub.add_parser(name, **kwargs)
        q.add_argument("diagram", help="diagram file (.hd)")
        q.set_defaults(fn=fn)
        return q

    diagram_verb("validate", _cmd_validate, help="check diagram invariants")
    diagram_verb("info", _cmd_info, help="genus, regions, class summary")
    diagram_verb("generators", _cmd_generators, help="enumerate generators")

    q = diagram_verb("domains", _cmd_domains, help="enumerate connecting domains")
    q.add_argument("--from", dest="from_", required=True, help="source generator")
    q.add_argument("--to", dest="to", required=True, help="target generator")
    q.add_argument("--max-coeff", type=int, default=4)
    q.add_argument("--positive", action="store_true")

    q = diagram_verb("index", _cmd_index, help="index quantities of a domain")
    q.add_argument("--from", dest="from_", required=True)
    q.add_argument("--to", dest="to", required=True)
    q.add_argument("--domain", required=True)
    q.add_argument(
        "--force",
        action="store_true",
        help="evaluate even if the domain does not connect the generators",
    )

    q = diagram_verb("build-surface", _cmd_build_surface, help="run the construction")
    q.add_argument("--from", dest="from_", required=True)
    q.add_argument("--to", dest="to", required=True)
    q.add_argument("--domain", required=True)

    q = diagram_verb("stabilize", _cmd_stabilize, help="stabilized construction")
    q.add_argument("--from", dest="from_", required=True)
    q.add_argument("--to", dest="to", required=True)
    q.add_argument("--domain", required=True)

    q = sub.add_parser("check", help="run the verification suites")
    q.add_argument(
        "corpus",
        nargs="?",
        help="directory of .hd files (default: the bundled corpus)",
    )
    q.add_argument("--pattern-bound", type=int, default=3)
    q.add_argument("--max-coeff", type=int, default=3)
    q.add_argument("--k-max", type=int, default=3)
    q.set_defaults(fn=_cmd_check)

    return p


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except DiagramError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
