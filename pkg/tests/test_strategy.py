import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_component_family
from vwspace.cnfspace import (
    adjacency_graph,
    cnf,
    evaluate_clause,
    evaluate_poly,
    gen_random_cnf,
    tr_encode,
)
from vwspace.covergame import GameState, init_cover, respond
from vwspace.errors import (
    FormatError,
    GameRuleError,
    InconsistencyError,
    ResourceCapError,
    ValidationError,
)
from vwspace.graph import VwMatching, component_right
from vwspace.strategy import (
    EMPTY_PRODUCT,
    LAMBDA,
    LAMBDA_FAMILY,
    FlippableFamily,
    PartialAssignment,
    PiecewiseAssignment,
    ProductFamily,
    check_k_winning,
    check_rfree,
    component_family,
    extract_strategy,
    family_of_matching,
    is_flippable,
    parse_kwin_certificate,
    product,
    tagged_axioms,
    to_rfree,
    verify_kwin_certificate,
    write_kwin_certificate,
)

EPS = Fraction(1, 24)
TRI_S = 3458


def fam(*dicts):
    return FlippableFamily.of(PartialAssignment.of(d) for d in dicts)


def sparse_formula(seed):
    return gen_random_cnf(12, Fraction(1, 2), seed=seed)


def triples_formula():
    """Clauses over pairwise disjoint variable triples: every covering
    game hypothesis verifies on its adjacency graph."""
    return cnf(12, [(1, 2, 3), (-4, 5, 6), (7, -8, 9), (10, 11, -12)])


def structural_strategy(phi, mu=2, s=4):
    graph = adjacency_graph(phi)
    degree = max((len(graph.radj[r]) for r in range(graph.right_count)),
                 default=0)
    cover = init_cover(graph, EPS, max(degree, 1), s, strict=False,
                       enforce_property=False)
    return extract_strategy(phi, cover, mu=mu)


def enforce_strategy(phi, mu=2):
    cover = init_cover(adjacency_graph(phi), EPS, 1, TRI_S, strict=True)
    return extract_strategy(phi, cover, mu=mu)


# ---------------------------------------------------------------------------
# partial assignments


def test_assignment_of_sorts_and_dedups():
    a = PartialAssignment.of([(3, 1), (1, 0), (3, 1)])
    assert a.pairs == ((1, 0), (3, 1))
    assert a.domain() == {1, 3}


def test_assignment_validation():
    with pytest.raises(ValidationError):
        PartialAssignment.of([(0, 1)])
    with pytest.raises(ValidationError):
        PartialAssignment.of([(1, 2)])
    with pytest.raises(ValidationError):
        PartialAssignment.of([(1, 0), (1, 1)])


def test_assignment_literal_values_are_bar_consistent():
    a = PartialAssignment.of({2: 1, 5: 0})
    assert a.value(2) == 1 and a.value(-2) == 0
    assert a.value(5) == 0 and a.value(-5) == 1
    assert a.value(7) is None and a.value(-7) is None


def test_assignment_union_requires_disjoint_domains():
    a = PartialAssignment.of({1: 0})
    b = PartialAssignment.of({2: 1})
    assert a.union(b).pairs == ((1, 0), (2, 1))
    with pytest.raises(ValidationError):
        a.union(PartialAssignment.of({1: 1}))


def test_lambda_is_empty():
    assert LAMBDA.pairs == () and LAMBDA.domain() == frozenset()


# ---------------------------------------------------------------------------
# flippable families


def test_family_requires_shared_domain_and_members():
    with pytest.raises(ValidationError):
        FlippableFamily.of([])
    with pytest.raises(ValidationError):
        fam({1: 0}, {2: 1})


def test_is_flippable_examples():
    assert is_flippable(fam({1: 0}, {1: 1}))
    assert is_flippable(fam({1: 1, 2: 0}, {1: 0, 2: 1}))
    assert not is_flippable(fam({1: 1}))


def test_lambda_family_is_flippable_and_empty_domain():
    assert LAMBDA_FAMILY.domain() == frozenset()
    assert is_flippable(LAMBDA_FAMILY)


# ---------------------------------------------------------------------------
# products


def test_empty_product_is_lambda():
    p = product([])
    assert p == EMPTY_PRODUCT
    assert p.rank() == 0
    assert p.assignments() == (LAMBDA,)


def test_product_with_lambda_family_is_identity():
    f = fam({1: 0}, {1: 1})
    assert product([f, LAMBDA_FAMILY]) == product([f])
    assert product([f, LAMBDA_FAMILY]).rank() == 1


def test_product_rank_and_assignments():
    f = fam({1: 0}, {1: 1})
    g = fam({2: 0, 3: 1}, {2: 1, 3: 0})
    p = product([g, f])
    assert p.rank() == 2
    assert p.domain() == {1, 2, 3}
    assert len(p.assignments()) == 4
    assert all(a.domain() == {1, 2, 3} for a in p.assignments())


def test_product_factor_order_is_canonical():
    f = fam({1: 0}, {1: 1})
    g = fam({2: 0}, {2: 1})
    assert product([f, g]) == product([g, f])


def test_product_rejects_overlapping_domains():
    with pytest.raises(ValidationError):
        product([fam({1: 0}, {1: 1}), fam({1: 0, 2: 0}, {1: 1, 2: 1})])


def test_restrictions_and_contains():
    f = fam({1: 0}, {1: 1})
    g = fam({2: 0}, {2: 1})
    p = product([f, g])
    subs = p.restrictions()
    assert len(subs) == 4
    assert EMPTY_PRODUCT in subs and p in subs
    assert all(p.contains(q) for q in subs)
    assert not product([f]).contains(p)


# ---------------------------------------------------------------------------
# component families


def test_v_component_family():
    phi = cnf(3, [(1, 2, 3)])
    graph = adjacency_graph(phi)
    family = component_family(phi, graph, (0, 0, 1))
    rows = {a.pairs for a in family.assignments}
    assert rows == {((1, 1), (2, 0)), ((1, 0), (2, 1)), ((1, 1), (2, 1))}
    assert family.domain() == {1, 2}
    assert is_flippable(family)


def test_w_component_family():
    phi = cnf(5, [(1, 2, 4), (-2, 3, 5)])
    graph = adjacency_graph(phi)
    family = component_family(phi, graph, (0, 0, 1, 1, 2))
    rows = sorted("".join(str(a.get(v)) for v in (1, 2, 3))
                  for a in family.assignments)
    assert rows == ["011", "100", "101", "111"]
    assert family.domain() == {1, 2, 3}


def test_isolated_component_family():
    phi = cnf(3, [(1, 2, 3)])
    graph = adjacency_graph(phi)
    family = component_family(phi, graph, (2,))
    assert {a.pairs for a in family.assignments} == {((3, 0),), ((3, 1),)}


def test_component_family_matches_naive_enumeration():
    rng = random.Random(11)
    for _ in range(25):
        phi = gen_random_cnf(8, 2, seed=rng.randrange(10 ** 6))
        graph = adjacency_graph(phi)
        strategy = structural_strategy(phi)
        for comp in strategy.component_pool()[:40]:
            family = component_family(phi, graph, comp)
            got = sorted(a.pairs for a in family.assignments)
            assert got == naive_component_family(phi, comp)
            assert family.domain() == {r + 1 for r in component_right(comp)}
            assert is_flippable(family)


def test_component_family_validation():
    phi = cnf(3, [(1, 2, 3)])
    graph = adjacency_graph(phi)
    with pytest.raises(ValidationError):
        component_family(phi, graph, (0, 1, 1))
    with pytest.raises(ValidationError):
        component_family(cnf(4, [(1, 2, 3)]), graph, (0,))


def test_family_of_matching_rank_and_compositionality():
    phi = triples_formula()
    graph = adjacency_graph(phi)
    left = VwMatching.of(((0, 0, 1),))
    right = VwMatching.of(((3, 1, 4),))
    both = VwMatching.of(((0, 0, 1), (3, 1, 4)))
    assert family_of_matching(phi, graph, VwMatching.of(())) == EMPTY_PRODUCT
    assert family_of_matching(phi, graph, both).rank() == 2
    assert family_of_matching(phi, graph, both) == product(
        family_of_matching(phi, graph, left).factors
        + family_of_matching(phi, graph, right).factors)


# ---------------------------------------------------------------------------
# tagged axioms


def test_tagged_axioms_match_encoding_order():
    phi = sparse_formula(3)
    tagged = tagged_axioms(phi)
    plain = tr_encode(phi)
    assert len(tagged) == len(phi.clauses) + 2 * phi.variable_count
    assert [p for _, p in tagged] == list(plain)
    kinds = [tag[0] for tag, _ in tagged]
    m = len(phi.clauses)
    assert kinds[:m] == ["clause"] * m
    assert kinds[m:] == ["square", "complement"] * phi.variable_count


# ---------------------------------------------------------------------------
# viability and membership


def test_blocking_mismatch_component_is_not_viable():
    # the first clause's pair {x1, x2} reappears negated in the second,
    # so the path matching exactly that pair can never be extended to
    # satisfy the second clause and must be excluded
    phi = cnf(5, [(1, 2, 3), (-1, -2, 4)])
    strategy = structural_strategy(phi)
    viable = strategy.viable_components()
    assert (0, 0, 1) not in viable
    assert not strategy.is_member(VwMatching.of(((0, 0, 1),)))
    assert (0, 0, 2) in viable
    assert strategy.is_member(VwMatching.of(((0, 0, 2),)))


def test_matching_polarity_component_stays_viable():
    phi = cnf(5, [(1, 2, 3), (1, 2, 4)])
    strategy = structural_strategy(phi)
    assert (0, 0, 1) in strategy.viable_components()


def test_isolated_components_are_members_on_sparse_instances():
    strategy = structural_strategy(sparse_formula(0))
    for r in range(12):
        assert strategy.is_member(VwMatching.of(((r,),)))


def test_membership_rejects_overlap_and_invalid():
    strategy = structural_strategy(sparse_formula(0))
    comp = next(c for c in sorted(strategy.viable_components()) if len(c) == 3)
    assert not strategy.is_member(VwMatching.of((comp, (comp[0],))))
    assert not strategy.is_member(VwMatching(components=((0, 9, 1),)))


def test_enforce_membership_uses_property_not_viability():
    strategy = enforce_strategy(triples_formula())
    assert strategy.is_member(VwMatching.of(((0, 0, 1), (3, 1, 4))))
    assert not strategy.is_member(VwMatching.of(((0, 0, 1), (1, 0, 2))))


def test_enumerate_members_is_deterministic_and_capped():
    strategy = structural_strategy(sparse_formula(1))
    members = strategy.enumerate_members(max_rank=1)
    again = structural_strategy(sparse_formula(1)).enumerate_members(1)
    assert members == again
    assert members[0] == VwMatching.of(())
    assert all(m.component_count() <= 1 for m in members)
    with pytest.raises(ResourceCapError):
        strategy.enumerate_members(max_rank=2, bound=5)


# ---------------------------------------------------------------------------
# extension queries


def test_clause_extension_of_lambda_satisfies_the_encoded_clause():
    phi = sparse_formula(0)
    strategy = structural_strategy(phi)
    empty = VwMatching.of(())
    for tag, poly in tagged_axioms(phi):
        if tag[0] != "clause":
            continue
        bigger = strategy.extend(empty, tag)
        family = strategy.family_of(bigger)
        assert all(evaluate_poly(poly, a.as_dict()).is_zero()
                   for a in family.assignments())


def test_boolean_extension_gains_domain_with_both_values():
    phi = sparse_formula(0)
    strategy = structural_strategy(phi)
    empty = VwMatching.of(())
    for v in (1, 5, 12):
        bigger = strategy.extend(empty, ("square", v))
        family = strategy.family_of(bigger)
        assert v in family.domain()
        assert {a.get(v) for a in family.assignments()} == {0, 1}


def test_extension_from_member_keeps_existing_components():
    phi = sparse_formula(0)
    strategy = structural_strategy(phi, mu=3)
    base = strategy.extend(VwMatching.of(()), ("clause", 0))
    covered_rights = {r + 1 for c in base.components
                      for r in component_right(c)}
    fresh = next(v for v in range(1, 13) if v not in covered_rights)
    bigger = strategy.extend(base, ("complement", fresh))
    assert set(base.components) <= set(bigger.components)
    assert fresh in strategy.family_of(bigger).domain()


def test_extension_is_noop_when_already_served():
    phi = sparse_formula(0)
    strategy = structural_strategy(phi, mu=3)
    base = strategy.extend(VwMatching.of(()), ("clause", 0))
    assert strategy.extend(base, ("clause", 0)) == base
    r = component_right(base.components[0])[0]
    assert strategy.extend(base, ("square", r + 1)) == base


def test_extension_respects_component_bound():
    phi = sparse_formula(0)
    strategy = structural_strategy(phi, mu=1)
    base = strategy.extend(VwMatching.of(()), ("clause", 0))
    with pytest.raises(GameRuleError):
        strategy.extend(base, ("clause", 1))


def test_extension_validation():
    strategy = structural_strategy(sparse_formula(0))
    empty = VwMatching.of(())
    with pytest.raises(ValidationError):
        strategy.extend(empty, ("clause", 99))
    with pytest.raises(ValidationError):
        strategy.extend(empty, ("square", 0))
    with pytest.raises(ValidationError):
        strategy.extend(empty, ("cube", 1))


def test_extract_strategy_validation():
    phi = sparse_formula(0)
    cover = init_cover(adjacency_graph(phi), EPS, 6, 4, strict=False,
                       enforce_property=False)
    with pytest.raises(ValidationError):
        extract_strategy(phi, cover, mu=0)
    with pytest.raises(ValidationError):
        extract_strategy(sparse_formula(1), cover, mu=2)


def test_enforce_extension_matches_game_responses():
    phi = triples_formula()
    strategy = enforce_strategy(phi, mu=4)
    state = GameState(strategy=strategy.cover, mu=4, mu_source="override",
                      matching=VwMatching.of(()))
    played = respond(state, ("L", 2))
    extended = strategy.extend(VwMatching.of(()), ("clause", 2))
    assert extended == played
    played2 = respond(state, ("R", 0))
    extended2 = strategy.extend(extended, ("square", 1))
    assert extended2 == played2


# ---------------------------------------------------------------------------
# the k-winning check


def test_lambda_only_strategy_is_zero_winning():
    phi = cnf(1, [(1,), (-1,)])
    strategy = structural_strategy(phi, mu=1)
    report = check_k_winning(phi, strategy, 0)
    assert report.ok
    assert report.members_checked == 1
    assert report.claimed_monomial_space == 0
    assert report.claimed_total_space is None


def test_contradiction_defeats_one_winning():
    phi = cnf(1, [(1,), (-1,)])
    strategy = structural_strategy(phi, mu=1)
    report = check_k_winning(phi, strategy, 1)
    assert not report.ok
    assert "clause" in report.failure


def test_sparse_extractions_are_two_winning():
    for seed in range(6):
        phi = sparse_formula(seed)
        report = check_k_winning(phi, structural_strategy(phi), 2)
        assert report.ok, (seed, report.failure)
        assert report.claimed_monomial_space == Fraction(1, 2)
        assert report.claimed_total_space == Fraction(1, 4)
        assert report.extensions_checked > 0


def test_enforce_extraction_is_two_winning():
    phi = triples_formula()
    report = check_k_winning(phi, enforce_strategy(phi), 2)
    assert report.ok, report.failure


def test_dense_extraction_fails_honestly():
    phi = gen_random_cnf(12, 6, seed=0)
    strategy = structural_strategy(phi)
    assert strategy.viable_components() == frozenset()
    report = check_k_winning(phi, strategy, 2)
    assert not report.ok
    assert "no viable component" in report.failure
    assert report.claimed_monomial_space is None


def test_check_k_winning_validation_and_cap():
    phi = sparse_formula(0)
    strategy = structural_strategy(phi)
    with pytest.raises(ValidationError):
        check_k_winning(phi, strategy, -1)
    with pytest.raises(ResourceCapError):
        check_k_winning(phi, strategy, 2, enumeration_bound=3)


def test_restriction_closure_of_extensions():
    phi = sparse_formula(2)
    strategy = structural_strategy(phi, mu=3)
    matching = strategy.extend(VwMatching.of(()), ("clause", 1))
    matching = strategy.extend(matching, ("clause", 3))
    for r in range(matching.component_count() + 1):
        for combo in itertools.combinations(matching.components, r):
            assert strategy.is_member(VwMatching.of(combo))


# ---------------------------------------------------------------------------
# piecewise assignments and r-free families


def test_piecewise_validation_and_order():
    a = PartialAssignment.of({2: 1})
    b = PartialAssignment.of({1: 0})
    alpha = PiecewiseAssignment.of([a, b])
    assert alpha.pieces == (b, a)
    assert alpha.size() == 2
    assert alpha.union().pairs == ((1, 0), (2, 1))
    with pytest.raises(ValidationError):
        PiecewiseAssignment.of([LAMBDA])
    with pytest.raises(ValidationError):
        PiecewiseAssignment.of([a, PartialAssignment.of({2: 0})])


def test_piecewise_sub_assignments():
    alpha = PiecewiseAssignment.of([PartialAssignment.of({1: 0}),
                                    PartialAssignment.of({2: 1})])
    subs = alpha.sub_assignments()
    assert len(subs) == 4
    assert PiecewiseAssignment.of([]) in subs
    assert all(alpha.contains(s) for s in subs)


def test_to_rfree_at_one_is_the_empty_family():
    strategy = structural_strategy(sparse_formula(0))
    family = to_rfree(strategy, 1)
    assert family.enumerate_members() == (PiecewiseAssignment.of([]),)
    assert check_rfree(strategy.phi, family, 0).ok
    with pytest.raises(ValidationError):
        to_rfree(strategy, 0)


def test_sparse_rfree_families_verify():
    for seed in range(6):
        phi = sparse_formula(seed)
        strategy = structural_strategy(phi)
        family = to_rfree(strategy, 2)
        report = check_rfree(phi, family, 1)
        assert report.ok, (seed, report.failure)
        assert report.claimed_total_space == Fraction(1, 4)
        for alpha in family.enumerate_members():
            merged = alpha.union().as_dict()
            assert all(evaluate_clause(c, merged) is not False
                       for c in phi.clauses)


def test_rfree_membership():
    strategy = structural_strategy(sparse_formula(0))
    family = to_rfree(strategy, 2)
    members = family.enumerate_members()
    assert family.is_member(members[-1])
    assert not family.is_member(
        PiecewiseAssignment.of([PartialAssignment.of({1: 0, 2: 0, 3: 0,
                                                      4: 0})]))


def test_rfree_rejects_empty_family():
    phi = sparse_formula(0)
    report = check_rfree(phi, [], 1)
    assert not report.ok and report.failure == "family is empty"


def test_rfree_detects_consistency_violation():
    phi = cnf(3, [(1, 2, 3)])
    alpha = PiecewiseAssignment.of([PartialAssignment.of({1: 0, 2: 0, 3: 0})])
    report = check_rfree(phi, [PiecewiseAssignment.of([]), alpha], 1)
    assert not report.ok and "falsifies clause 0" in report.failure


def test_rfree_detects_retraction_violation():
    phi = cnf(3, [(1, 2, 3)])
    alpha = PiecewiseAssignment.of([PartialAssignment.of({1: 1}),
                                    PartialAssignment.of({2: 1})])
    report = check_rfree(phi, [PiecewiseAssignment.of([]), alpha], 0)
    assert not report.ok and "retraction" in report.failure


def test_rfree_detects_extension_violation():
    phi = cnf(2, [(1, 2)])
    report = check_rfree(phi, [PiecewiseAssignment.of([])], 1)
    assert not report.ok and "no extension" in report.failure


def test_rfree_cap_and_validation():
    phi = sparse_formula(0)
    strategy = structural_strategy(phi)
    with pytest.raises(ValidationError):
        check_rfree(phi, to_rfree(strategy, 2), -1)
    with pytest.raises(ResourceCapError):
        check_rfree(phi, to_rfree(strategy, 2), 1, enumeration_bound=4)


# ---------------------------------------------------------------------------
# certificates


def test_certificate_roundtrip_verifies():
    phi = sparse_formula(0)
    strategy = structural_strategy(phi)
    cert = write_kwin_certificate(strategy, 2)
    again = write_kwin_certificate(structural_strategy(phi), 2)
    assert cert == again
    report = verify_kwin_certificate(phi, cert)
    assert report.ok, report.failure


def test_certificate_fields_parse_back():
    strategy = structural_strategy(sparse_formula(0))
    data = parse_kwin_certificate(write_kwin_certificate(strategy, 2))
    assert data["k"] == 2
    assert data["epsilon"] == EPS
    assert data["enforce"] == 0
    assert len(data["digest"]) == 64
    assert data["tables"]


def test_tampered_certificate_fails_verification():
    phi = sparse_formula(0)
    cert = write_kwin_certificate(structural_strategy(phi), 2)
    lines = cert.splitlines()
    for i, line in enumerate(lines):
        if line.startswith("x digest"):
            lines[i] = "x digest " + "0" * 64
    report = verify_kwin_certificate(phi, "\n".join(lines) + "\n")
    assert not report.ok and "digest" in report.failure


def test_tampered_table_fails_verification():
    phi = sparse_formula(0)
    cert = write_kwin_certificate(structural_strategy(phi), 2)
    lines = cert.splitlines()
    for i, line in enumerate(lines):
        if line.startswith("t "):
            head, _, rows = line.rpartition(":")
            lines[i] = head + ": " + " ".join(
                row[::-1] if row[0] != row[-1] else row
                for row in rows.split())
            break
    report = verify_kwin_certificate(phi, "\n".join(lines) + "\n")
    assert not report.ok and "table" in report.failure


@pytest.mark.parametrize("text", [
    "p kwin\n",
    "p wrong 2\n",
    "q kwin 2\n",
    "p kwin 2\nx epsilon nope\n",
    "p kwin 2\nt 0 : bad\n",
])
def test_malformed_certificates_raise(text):
    with pytest.raises(FormatError):
        parse_kwin_certificate(text)


def test_certificate_requires_all_fields():
    with pytest.raises(FormatError):
        parse_kwin_certificate("p kwin 2\nx s 4\n")


# ---------------------------------------------------------------------------
# properties


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_component_families_satisfy_their_paths(seed):
    phi = gen_random_cnf(6, 2, seed=seed)
    graph = adjacency_graph(phi)
    strategy = structural_strategy(phi)
    for comp in strategy.component_pool()[:20]:
        family = component_family(phi, graph, comp)
        lefts = comp[1::2]
        for a in family.assignments:
            merged = a.as_dict()
            for l in lefts:
                assert evaluate_clause(phi.clauses[l], merged) is True


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_product_assignment_counts_multiply(seed):
    phi = gen_random_cnf(9, 2, seed=seed)
    graph = adjacency_graph(phi)
    strategy = structural_strategy(phi)
    members = strategy.enumerate_members(max_rank=2, bound=20000)
    rng = random.Random(seed)
    for matching in rng.sample(members, min(10, len(members))):
        sizes = [len(component_family(phi, graph, c).assignments)
                 for c in matching.components]
        expect = 1
        for size in sizes:
            expect *= size
        assert len(strategy.family_of(matching).assignments()) == expect
