import pytest

from hdindex.domains import Domain
from hdindex.harness import (
    BUNDLED_DIAGRAMS,
    SuiteResult,
    _is_disjoint_strip_class,
    additivity_suite,
    builder_consistency_suite,
    bundled_corpus,
    format_results,
    load_bundled,
    local_pattern_oracle,
    stabilization_suite,
    stabilized_surface_suite,
)
from hdindex.diagram import validate_diagram


def test_bundled_corpus_is_valid():
    corpus = bundled_corpus()
    assert set(corpus) == set(BUNDLED_DIAGRAMS)
    genera = sorted(d.genus for d in corpus.values())
    assert genera == [1, 1, 1, 2, 2, 3]
    for d in corpus.values():
        assert validate_diagram(d) == []


def test_local_pattern_oracle_small():
    res = local_pattern_oracle(2)
    assert res.ok
    assert res.cases == 27 * 5
    with pytest.raises(ValueError):
        local_pattern_oracle(0)


def test_additivity_small(torus3):
    res = additivity_suite(torus3, max_coeff=2)
    assert res.ok
    assert res.cases > 0


def test_stabilization_small(torus3):
    res = stabilization_suite(torus3, k_max=2, max_coeff=1)
    assert res.ok


def test_builder_suite_small(torus3, genus2s1s2):
    for d in (torus3, genus2s1s2):
        res = builder_consistency_suite(d, max_coeff=2)
        assert res.ok
        assert res.cases > 0


def test_stabilized_suite_small(genus2s1s2, torus1):
    res = stabilized_surface_suite(genus2s1s2, max_coeff=1)
    assert res.ok and res.cases > 0
    # genus one is skipped, not failed
    res = stabilized_surface_suite(torus1, max_coeff=1)
    assert res.ok and res.cases == 0


def test_strip_class_predicate(torus1, torus3, genus2):
    # the lone square of the one-crossing torus is the whole surface, glued
    # to itself: not an embedded strip
    assert not _is_disjoint_strip_class(torus1, Domain.parse(torus1, "r0:1"))
    assert _is_disjoint_strip_class(torus3, Domain.zero(torus3))
    assert _is_disjoint_strip_class(torus3, Domain.parse(torus3, "r1:1"))
    assert not _is_disjoint_strip_class(torus3, Domain.parse(torus3, "r1:2"))
    # adjacent supports share a vertex
    assert not _is_disjoint_strip_class(torus3, Domain.parse(torus3, "r1:1,r2:1"))
    # the lens and a surrounding square share crossings
    assert not _is_disjoint_strip_class(genus2, Domain.parse(genus2, "r2:1,r7:1"))


def test_format_results_reports_failures():
    results = [
        SuiteResult("good", cases=3),
        SuiteResult("bad", cases=1, failures=[{"case": 1}]),
    ]
    text = format_results(results)
    assert "FAIL (1)" in text
    assert "good" in text
