"""Brute-force oracles and property suites over the bundled diagrams.

Each suite exhaustively enumerates a bounded family of inputs, recomputes
both sides of an identity through independent code paths, and reports every
violation with enough data to replay the case through the command line.
All suites are deterministic; a run is green iff every suite reports zero
failures.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from hdindex.diagram import HeegaardDiagram, parse_diagram, validate_diagram
from hdindex.domains import (
    Domain,
    Generator,
    connects,
    enumerate_generators,
    find_domains,
    is_positive,
    sigma_class,
)
from hdindex.formulas import (
    analytic_index,
    embedded_euler_char,
    euler_measure,
    generator_multiplicity,
    maslov_index,
)
from hdindex.builder import (
    BuilderError,
    build_surface,
    local_vertex_chains,
    stabilized_surface,
    branched_cover_check,
)

BUNDLED_DIAGRAMS = (
    "torus_g1_1x.hd",
    "torus_g1_2x.hd",
    "torus_g1_3x.hd",
    "genus2_bigons.hd",
    "genus2_s1s2.hd",
    "genus3_chain.hd",
)


@dataclass
class SuiteResult:
    suite: str
    cases: int = 0
    failures: list[dict] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "cases": self.cases,
            "failures": self.failures,
            "elapsed": round(self.elapsed, 3),
            "ok": self.ok,
        }


def load_bundled(name: str) -> HeegaardDiagram:
    """Parse one of the diagrams shipped with the package."""
    text = resources.files("hdindex.data").joinpath(name).read_text()
    return parse_diagram(text)


def bundled_corpus() -> dict[str, HeegaardDiagram]:
    return {name: load_bundled(name) for name in BUNDLED_DIAGRAMS}


# ---------------------------------------------------------------------------
# Suites


def local_pattern_oracle(bound: int = 3) -> SuiteResult:
    """Chain shapes of every local quadrant pattern up to the bound.

    Interior patterns (n, n+k, n+k+l, n+l) must split into n closed chains
    of length four and k+l smooth open chains of length two; bumping any
    single sector by one must yield exactly one odd open chain with every
    other open chain of length two.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    t0 = time.perf_counter()
    res = SuiteResult("local-pattern-oracle")
    for n in range(bound + 1):
        for k in range(bound + 1):
            for l in range(bound + 1):
                base = (n, n + k, n + k + l, n + l)
                res.cases += 1
                chains = local_vertex_chains(base)
                closed = [c for c in chains if c.kind == "closed"]
                opens = [c for c in chains if c.kind == "open"]
                if (
                    len(closed) != n
                    or any(c.length != 4 for c in closed)
                    or len(opens) != k + l
                    or any(c.length != 2 for c in opens)
                ):
                    res.failures.append(
                        {"pattern": base, "kind": "interior",
                         "chains": [(c.kind, c.length) for c in chains]}
                    )
                for bump in range(4):
                    coeffs = list(base)
                    coeffs[bump] += 1
                    res.cases += 1
                    chains = local_vertex_chains(tuple(coeffs))
                    odd = [c for c in chains if c.kind == "open" and c.length % 2]
                    even = [
                        c for c in chains if c.kind == "open" and c.length % 2 == 0
                    ]
                    closed = [c for c in chains if c.kind == "closed"]
                    if (
                        len(odd) != 1
                        or any(c.length != 2 for c in even)
                        or any(c.length != 4 for c in closed)
                    ):
                        res.failures.append(
                            {"pattern": tuple(coeffs), "kind": "corner",
                             "chains": [(c.kind, c.length) for c in chains]}
                        )
    res.elapsed = time.perf_counter() - t0
    return res


def _domain_table(
    d: HeegaardDiagram, max_coeff: int, positive_only: bool = True
) -> dict[tuple[Generator, Generator], list[Domain]]:
    gens = enumerate_generators(d)
    return {
        (x, y): find_domains(d, x, y, max_coeff, positive_only)
        for x in gens
        for y in gens
    }


def additivity_suite(d: HeegaardDiagram, max_coeff: int = 3) -> SuiteResult:
    """mu and e are additive under composition of connecting domains."""
    t0 = time.perf_counter()
    res = SuiteResult("additivity")
    table = _domain_table(d, max_coeff)
    gens = enumerate_generators(d)
    for x in gens:
        for y in gens:
            for a in table[(x, y)]:
                mu_a = maslov_index(d, a, x, y)
                for z in gens:
                    for b in table[(y, z)]:
                        res.cases += 1
                        total = a + b
                        mu_b = maslov_index(d, b, y, z)
                        mu_ab = maslov_index(d, total, x, z)
                        e_ok = euler_measure(d, total) == euler_measure(
                            d, a
                        ) + euler_measure(d, b)
                        if mu_ab != mu_a + mu_b or not e_ok:
                            res.failures.append(
                                {
                                    "x": x.format(),
                                    "y": y.format(),
                                    "z": z.format(),
                                    "a": a.format(),
                                    "b": b.format(),
                                    "mu_a": str(mu_a),
                                    "mu_b": str(mu_b),
                                    "mu_ab": str(mu_ab),
                                }
                            )
    res.elapsed = time.perf_counter() - t0
    return res


def stabilization_suite(
    d: HeegaardDiagram, k_max: int = 3, max_coeff: int = 2
) -> SuiteResult:
    """Adding k full-surface classes shifts mu by 2k and chi by k(2 - 4g)."""
    t0 = time.perf_counter()
    res = SuiteResult("stabilization")
    sigma = sigma_class(d)
    g = d.genus
    table = _domain_table(d, max_coeff)
    for (x, y), domains in table.items():
        for a in domains:
            mu0 = maslov_index(d, a, x, y)
            chi0 = embedded_euler_char(d, a, x, y)
            for k in range(k_max + 1):
                res.cases += 1
                ak = a + k * sigma
                mu_k = maslov_index(d, ak, x, y)
                chi_k = embedded_euler_char(d, ak, x, y)
                idx = analytic_index(g, chi_k, euler_measure(d, ak))
                if (
                    mu_k != mu0 + 2 * k
                    or chi_k != chi0 + k * (2 - 4 * g)
                    or idx != mu_k
                ):
                    res.failures.append(
                        {
                            "x": x.format(),
                            "y": y.format(),
                            "a": a.format(),
                            "k": k,
                            "mu": str(mu_k),
                            "chi": str(chi_k),
                        }
                    )
    res.elapsed = time.perf_counter() - t0
    return res


def builder_consistency_suite(
    d: HeegaardDiagram, max_coeff: int = 3
) -> SuiteResult:
    """Build every bounded positive connecting domain and check the contract.

    Checks per case: 2g right-angle corners, one boundary arc per curve,
    pushforward equal to the domain, chi of the built surface congruent to
    the embedded chi mod 2, and (for coefficient-one domains supported on
    pairwise disjoint bigons and squares) exact equality of the two.
    """
    t0 = time.perf_counter()
    res = SuiteResult("builder-consistency")
    table = _domain_table(d, max_coeff)
    for (x, y), domains in table.items():
        for a in domains:
            if not is_positive(a):
                continue
            res.cases += 1
            case = {
                "x": x.format(),
                "y": y.format(),
                "a": a.format(),
            }
            try:
                s3 = build_surface(d, a, x, y)
            except BuilderError as exc:
                res.failures.append(dict(case, error=str(exc)))
                continue
            chi_emb = embedded_euler_char(d, a, x, y)
            problems = []
            corners = s3.corners()
            if len(corners) != 2 * d.genus:
                problems.append(f"corners {len(corners)}")
            if any(length != 1 for _, length in corners):
                problems.append("non-right-angle corner")
            arcs = s3.boundary_arcs()
            if any(
                len(lst) != 1 or lst[0].get("circle") for lst in arcs.values()
            ):
                problems.append("boundary arcs")
            if s3.pushforward() != a:
                problems.append("pushforward")
            if (s3.chi - chi_emb) % 2 != 0:
                problems.append("chi parity")
            if _is_disjoint_strip_class(d, a) and s3.chi != chi_emb:
                problems.append(f"strip class chi {s3.chi} != {chi_emb}")
            if problems:
                res.failures.append(dict(case, problems=problems))
    res.elapsed = time.perf_counter() - t0
    return res


def stabilized_surface_suite(
    d: HeegaardDiagram, max_coeff: int = 1
) -> SuiteResult:
    """Stage-S4 contract over the bounded positive domains (genus above one).

    Checks connectivity, pushforward A plus the surface class, 2g corners,
    even per-component corner counts with halves summing to the genus, and
    a nonnegative integral branch budget.
    """
    t0 = time.perf_counter()
    res = SuiteResult("stabilized-surface")
    if d.genus <= 1:
        res.elapsed = time.perf_counter() - t0
        return res
    sigma = sigma_class(d)
    table = _domain_table(d, max_coeff)
    for (x, y), domains in table.items():
        for a in domains:
            res.cases += 1
            case = {"x": x.format(), "y": y.format(), "a": a.format()}
            try:
                s4 = stabilized_surface(d, a, x, y)
            except BuilderError as exc:
                res.failures.append(dict(case, error=str(exc)))
                continue
            rep = branched_cover_check(s4)
            problems = []
            if not rep["ok"]:
                problems.append("cover check")
            if s4.pushforward() != a + sigma:
                problems.append("pushforward")
            if len(s4.corners()) != 2 * d.genus:
                problems.append("corner count")
            if problems:
                res.failures.append(dict(case, problems=problems, report=rep))
    res.elapsed = time.perf_counter() - t0
    return res


def _is_disjoint_strip_class(d: HeegaardDiagram, a: Domain) -> bool:
    """Coefficient-one support on pairwise disjoint embedded bigons and squares.

    Embedded means the region's closure is a disk: its boundary visits
    distinct vertices and it is not glued to itself across any edge.
    """
    if any(c not in (0, 1) for c in a.coeffs):
        return False
    support = set(a.support())
    if not support:
        return True
    for idx in support:
        region = d.regions[idx]
        if region.corner_count not in (2, 4):
            return False
        verts = [dart.vertex for dart in region.darts]
        if len(set(verts)) != len(verts):
            return False
        darts = set(region.darts)
        if any(d.rev(dart) in darts for dart in darts):
            return False
    # supports may not share a vertex (disjoint closures)
    touched: set[str] = set()
    for idx in support:
        verts = {dart.vertex for dart in d.regions[idx].darts}
        if touched & verts:
            return False
        touched |= verts
    return True


# ---------------------------------------------------------------------------
# Runner


def run_all(
    diagrams: dict[str, HeegaardDiagram] | None = None,
    pattern_bound: int = 3,
    max_coeff: int = 3,
    k_max: int = 3,
) -> list[SuiteResult]:
    """Run every suite; diagram-level suites run per bundled diagram."""
    if diagrams is None:
        diagrams = bundled_corpus()
    results = [local_pattern_oracle(pattern_bound)]
    for name, d in diagrams.items():
        bad = validate_diagram(d)
        res = SuiteResult(f"validity[{name}]", cases=1)
        if bad:
            res.failures.append({"violations": [v.code for v in bad]})
        results.append(res)
        if bad:
            continue
        for suite, kwargs in (
            (additivity_suite, {"max_coeff": min(max_coeff, 2)}),
            (stabilization_suite, {"k_max": k_max, "max_coeff": 2}),
            (builder_consistency_suite, {"max_coeff": max_coeff}),
            (stabilized_surface_suite, {"max_coeff": 1}),
        ):
            r = suite(d, **kwargs)
            r.suite = f"{r.suite}[{name}]"
            results.append(r)
    return results


def format_results(results: list[SuiteResult]) -> str:
    lines = []
    for r in results:
        status = "ok" if r.ok else f"FAIL ({len(r.failures)})"
        lines.append(f"{r.suite:45s} {r.cases:6d} cases  {r.elapsed:8.3f}s  {status}")
    total_fail = sum(len(r.failures) for r in results)
    lines.append(
        f"{'total':45s} {sum(r.cases for r in results):6d} cases  "
        f"{sum(r.elapsed for r in results):8.3f}s  "
        f"{'ok' if total_fail == 0 else f'FAIL ({total_fail})'}"
    )
    return "\n".join(lines)
