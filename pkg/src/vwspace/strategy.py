"""Assignment families extracted from covering games.

A VW-matching component over a clause-variable adjacency graph carries a
small family of assignments to its matched variables under which every
clause on the path is satisfied by a matched literal.  Products of those
families over the components of a matching, closed under dropping
factors and extended by playing covering moves, form the strategies this
module builds, checks, and converts into families of piecewise
assignments.

A product family satisfies a clause exactly when one of its factors
satisfies it in every row (rows of distinct factors touch disjoint
variables, so per-row coverage cannot be split across factors).  A
flippable factor therefore needs at least two of the clause's variables
to satisfy it.  This has a sharp consequence used throughout: a rank-one
member whose domain contains two variables of a clause it does not
satisfy row-by-row can never be extended to satisfy that clause, so such
components are excluded from membership up front.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

from .cnfspace import (
    Cnf,
    adjacency_graph,
    boolean_axioms,
    evaluate_clause,
    tr_clause,
)
from .covergame import CoverStrategyState, _cached_property
from .errors import (
    FormatError,
    GameRuleError,
    InconsistencyError,
    ResourceCapError,
    ValidationError,
)
from .graph import (
    BipartiteGraph,
    VwMatching,
    component_left,
    component_right,
    left_sets_of,
    right_sets_of,
    validate_vw_matching,
    vw_components_through_left,
)

__all__ = [
    "PartialAssignment",
    "LAMBDA",
    "FlippableFamily",
    "LAMBDA_FAMILY",
    "ProductFamily",
    "EMPTY_PRODUCT",
    "PiecewiseAssignment",
    "WinningStrategy",
    "KWinningReport",
    "RFreeFamily",
    "RFreeReport",
    "is_flippable",
    "product",
    "component_family",
    "family_of_matching",
    "tagged_axioms",
    "extract_strategy",
    "check_k_winning",
    "to_rfree",
    "check_rfree",
    "write_kwin_certificate",
    "parse_kwin_certificate",
    "verify_kwin_certificate",
]

DEFAULT_MEMBER_CAP = 100_000


# ---------------------------------------------------------------------------
# assignments and families


@dataclass(frozen=True)
class PartialAssignment:
    """A 0/1 assignment to some variables; the complement literal of a
    variable is always valued as one minus the variable."""

    pairs: tuple[tuple[int, int], ...]

    @staticmethod
    def of(mapping) -> "PartialAssignment":
        items = mapping.items() if hasattr(mapping, "items") else mapping
        seen: dict[int, int] = {}
        for var, val in items:
            if not (isinstance(var, int) and var >= 1):
                raise ValidationError("variable %r must be a positive int"
                                      % (var,))
            if val not in (0, 1):
                raise ValidationError("value %r must be 0 or 1" % (val,))
            if seen.get(var, val) != val:
                raise ValidationError("conflicting values for x%d" % var)
            seen[var] = val
        return PartialAssignment(pairs=tuple(sorted(seen.items())))

    def domain(self) -> frozenset[int]:
        return frozenset(var for var, _ in self.pairs)

    def get(self, variable: int) -> Optional[int]:
        for var, val in self.pairs:
            if var == variable:
                return val
        return None

    def value(self, literal: int) -> Optional[int]:
        """Value of a literal: negative literals read one minus the
        variable's value."""
        got = self.get(abs(literal))
        if got is None:
            return None
        return got if literal > 0 else 1 - got

    def union(self, other: "PartialAssignment") -> "PartialAssignment":
        if self.domain() & other.domain():
            raise ValidationError("domains overlap")
        return PartialAssignment(pairs=tuple(sorted(self.pairs + other.pairs)))

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)


LAMBDA = PartialAssignment(pairs=())


@dataclass(frozen=True)
class FlippableFamily:
    """A non-empty set of assignments over one shared domain."""

    assignments: tuple[PartialAssignment, ...]

    @staticmethod
    def of(assignments: Iterable[PartialAssignment]) -> "FlippableFamily":
        pool = sorted(set(assignments), key=lambda a: a.pairs)
        if not pool:
            raise ValidationError("a family needs at least one assignment")
        dom = pool[0].domain()
        if any(a.domain() != dom for a in pool):
            raise ValidationError("family members must share a domain")
        return FlippableFamily(assignments=tuple(pool))

    def domain(self) -> frozenset[int]:
        return self.assignments[0].domain()


LAMBDA_FAMILY = FlippableFamily(assignments=(LAMBDA,))


def is_flippable(family: FlippableFamily) -> bool:
    """Every domain variable takes both values somewhere in the family."""
    for var in family.domain():
        values = {a.get(var) for a in family.assignments}
        if values != {0, 1}:
            return False
    return True


@dataclass(frozen=True)
class ProductFamily:
    """An ordered product of flippable families with disjoint domains.

    Kept canonical: factors with empty domain are dropped (the product
    with the empty-assignment family is the identity) and the rest are
    sorted by domain, so equal products compare equal structurally.
    The rank is the number of factors.
    """

    factors: tuple[FlippableFamily, ...]

    def rank(self) -> int:
        return len(self.factors)

    def domain(self) -> frozenset[int]:
        out: set[int] = set()
        for f in self.factors:
            out |= f.domain()
        return frozenset(out)

    def assignments(self) -> tuple[PartialAssignment, ...]:
        out = []
        for combo in itertools.product(*(f.assignments
                                         for f in self.factors)):
            merged = LAMBDA
            for piece in combo:
                merged = merged.union(piece)
            out.append(merged)
        return tuple(sorted(out, key=lambda a: a.pairs))

    def restrictions(self) -> tuple["ProductFamily", ...]:
        out = []
        for r in range(len(self.factors) + 1):
            for combo in itertools.combinations(self.factors, r):
                out.append(ProductFamily(factors=combo))
        return tuple(out)

    def contains(self, other: "ProductFamily") -> bool:
        """other is a restriction of self: every factor of other is a
        factor of self."""
        return set(other.factors) <= set(self.factors)


EMPTY_PRODUCT = ProductFamily(factors=())


def product(factors: Iterable[FlippableFamily]) -> ProductFamily:
    """Combine families with pairwise disjoint domains into a product."""
    kept = []
    seen: set[int] = set()
    for f in factors:
        dom = f.domain()
        if not dom:
            continue
        if seen & dom:
            raise ValidationError("factor domains overlap on x%d"
                                  % min(seen & dom))
        seen |= dom
        kept.append(f)
    kept.sort(key=lambda f: tuple(sorted(f.domain())))
    return ProductFamily(factors=tuple(kept))


# ---------------------------------------------------------------------------
# families carried by matching components


def _matched_rights(component: tuple[int, ...]) -> dict[int, tuple[int, ...]]:
    """For each left vertex on the path, its adjacent right vertices."""
    out: dict[int, tuple[int, ...]] = {}
    rights = component_right(component)
    for i, l in enumerate(component_left(component)):
        out[l] = (rights[i], rights[i + 1])
    return out


def component_family(phi: Cnf, graph: BipartiteGraph,
                     component: tuple[int, ...]) -> FlippableFamily:
    """All assignments to the component's variables under which every
    clause on the path is satisfied by a matched literal.

    An isolated right vertex carries both values of its variable.  The
    family is asserted non-empty and flippable; a failure means a clause
    whose matched literals cannot be flipped, which the path shapes over
    3-clauses with distinct variables rule out.
    """
    if graph.left_count != len(phi.clauses) \
            or graph.right_count != phi.variable_count:
        raise ValidationError("graph shape does not match the formula")
    check = validate_vw_matching(graph, VwMatching.of((component,)))
    if not check.ok:
        raise ValidationError(check.reason)

    comp = tuple(component)
    variables = sorted(r + 1 for r in component_right(comp))
    matched = _matched_rights(comp)
    kept = []
    for bits in itertools.product((0, 1), repeat=len(variables)):
        alpha = PartialAssignment.of(zip(variables, bits))
        good = True
        for l, rights in matched.items():
            hit = any(alpha.value(lit) == 1
                      for lit in phi.clauses[l] if abs(lit) - 1 in rights)
            if not hit:
                good = False
                break
        if good:
            kept.append(alpha)
    if not kept:
        raise InconsistencyError(
            "no matched-literal assignment satisfies component %r" % (comp,))
    family = FlippableFamily.of(kept)
    if not is_flippable(family):
        raise InconsistencyError(
            "component %r carries a rigid family" % (comp,))
    return family


def family_of_matching(phi: Cnf, graph: BipartiteGraph,
                       matching: VwMatching) -> ProductFamily:
    """Product of the per-component families; rank equals the number of
    connected components."""
    return product(component_family(phi, graph, comp)
                   for comp in matching.components)


def tagged_axioms(phi: Cnf, field_: Optional[int] = None
                  ) -> tuple[tuple[tuple, object], ...]:
    """The encoded axioms of the formula with structured tags:
    ("clause", index), ("square", variable), ("complement", variable)."""
    out: list[tuple[tuple, object]] = []
    for i, clause in enumerate(phi.clauses):
        out.append((("clause", i), tr_clause(clause, field_)))
    for v in range(1, phi.variable_count + 1):
        square, complement = boolean_axioms(v, field_)
        out.append((("square", v), square))
        out.append((("complement", v), complement))
    return tuple(out)


# ---------------------------------------------------------------------------
# strategies


@dataclass
class WinningStrategy:
    """A lazily enumerated family of products of component families.

    Members are products over valid VW-matchings compatible with the
    backing cover state.  With the matching property enforced, a
    matching is compatible when each component either equals a pre-cover
    component or avoids the pre-cover, and the induced pair passes the
    property oracle within the cardinality budget, exactly as in the
    covering game.  Without enforcement, compatibility instead requires
    every component to be viable: its family falsifies no clause, it
    satisfies row-by-row every clause holding two or more of its
    variables (no extension can ever repair such a clause, see the
    module docstring), and partners survive for every clause and
    variable it leaves unserved.  Viability is the largest such set of
    components, computed as a fixpoint.

    Extension queries answer an axiom by playing the covering move for
    its clause or variable vertex.  Viability is calibrated to rank-one
    obligations; the definitional checker remains the arbiter.
    """

    phi: Cnf
    cover: CoverStrategyState
    mu: int
    _families: dict = field(default_factory=dict, repr=False)
    _pools: dict = field(default_factory=dict, repr=False)
    _verts: dict = field(default_factory=dict, repr=False)
    _valid: dict = field(default_factory=dict, repr=False)
    _rows: dict = field(default_factory=dict, repr=False)
    _allsat: dict = field(default_factory=dict, repr=False)
    _satisfiers: dict = field(default_factory=dict, repr=False)
    _idx: dict = field(default_factory=dict, repr=False)
    _viable_set: Optional[frozenset] = field(default=None, repr=False)
    _cmasks: Optional[list] = field(default=None, repr=False)

    @property
    def graph(self) -> BipartiteGraph:
        return self.cover.graph

    # -- families ----------------------------------------------------

    def family_of_component(self, comp: tuple[int, ...]) -> FlippableFamily:
        hit = self._families.get(comp)
        if hit is None:
            hit = component_family(self.phi, self.graph, comp)
            self._families[comp] = hit
        return hit

    def family_of(self, matching: VwMatching) -> ProductFamily:
        return product(self.family_of_component(c)
                       for c in matching.components)

    # -- bitmask rows ------------------------------------------------

    def _clause_masks(self) -> list[tuple[int, int, int]]:
        """Per clause: bitmasks of positive, negative and all variables,
        bit v-1 standing for variable v."""
        if self._cmasks is None:
            out = []
            for clause in self.phi.clauses:
                pos = neg = 0
                for lit in clause:
                    if lit > 0:
                        pos |= 1 << (lit - 1)
                    else:
                        neg |= 1 << (-lit - 1)
                out.append((pos, neg, pos | neg))
            self._cmasks = out
        return self._cmasks

    def _row_masks(self, comp: tuple[int, ...]
                   ) -> tuple[tuple[int, int], ...]:
        """Family rows as (domain mask, value bits) integer pairs."""
        hit = self._rows.get(comp)
        if hit is None:
            rows = []
            for a in self.family_of_component(comp).assignments:
                mask = bits = 0
                for var, val in a.pairs:
                    mask |= 1 << (var - 1)
                    if val:
                        bits |= 1 << (var - 1)
                rows.append((mask, bits))
            hit = tuple(rows)
            self._rows[comp] = hit
        return hit

    def _clause_allsat(self, comp: tuple[int, ...],
                       clause_index: int) -> bool:
        """Whether every assignment of the component's family satisfies
        the indexed clause."""
        key = (comp, clause_index)
        hit = self._allsat.get(key)
        if hit is None:
            pos, neg, _ = self._clause_masks()[clause_index]
            hit = all((bits & pos) | (mask & ~bits & neg)
                      for mask, bits in self._row_masks(comp))
            self._allsat[key] = hit
        return hit

    def _consistent(self, comp: tuple[int, ...]) -> bool:
        """No family row falsifies any clause of the formula.  A row can
        only falsify a clause whose variables it fully assigns."""
        masks = self._clause_masks()
        by_var = self._clauses_by_right()
        rights = self._vertex_sets(comp)[1]
        candidates = sorted({i for r in rights for i in by_var.get(r, ())})
        for mask, bits in self._row_masks(comp):
            for i in candidates:
                pos, neg, vars_ = masks[i]
                if vars_ & ~mask:
                    continue
                if not ((bits & pos) | (mask & ~bits & neg)):
                    return False
        return True

    def _clauses_by_right(self) -> dict[int, tuple[int, ...]]:
        hit = self._idx.get("clauses_by_right")
        if hit is None:
            build: dict[int, list[int]] = {}
            for i, clause in enumerate(self.phi.clauses):
                for lit in clause:
                    build.setdefault(abs(lit) - 1, []).append(i)
            hit = {r: tuple(v) for r, v in build.items()}
            self._idx["clauses_by_right"] = hit
        return hit

    # -- viability ---------------------------------------------------

    def component_pool(self) -> list[tuple[int, ...]]:
        """All single components over the graph: paths through every
        left vertex plus isolated right vertices, deduplicated."""
        hit = self._idx.get("component_pool")
        if hit is None:
            out: set[tuple[int, ...]] = set()
            for l in range(self.graph.left_count):
                out.update(self._pool(l))
            for r in range(self.graph.right_count):
                out.add((r,))
            hit = sorted(out, key=lambda c: (len(c), c))
            self._idx["component_pool"] = hit
        return hit

    def _pool(self, l: int) -> list[tuple[int, ...]]:
        hit = self._pools.get(l)
        if hit is None:
            hit = vw_components_through_left(self.graph, l)
            hit.sort(key=lambda c: (len(c), c))
            self._pools[l] = hit
        return hit

    def _vertex_sets(self, comp: tuple[int, ...]
                     ) -> tuple[frozenset[int], frozenset[int]]:
        hit = self._verts.get(comp)
        if hit is None:
            hit = (frozenset(component_left(comp)),
                   frozenset(component_right(comp)))
            self._verts[comp] = hit
        return hit

    def _blocking_clauses(self, comp: tuple[int, ...]) -> list[int]:
        """Clauses off the component's path holding at least two of its
        variables.  Only the component's own rows can ever satisfy such
        a clause inside a product, so these are hard constraints."""
        lefts, rights = self._vertex_sets(comp)
        by_var = self._clauses_by_right()
        counts: dict[int, int] = {}
        for r in rights:
            for i in by_var.get(r, ()):
                counts[i] = counts.get(i, 0) + 1
        return sorted(i for i, n in counts.items()
                      if n >= 2 and i not in lefts)

    def _satisfier_pool(self, clause_index: int) -> list[tuple[int, ...]]:
        """Components whose family satisfies the clause row-by-row.
        Such a component must hold two of the clause's variables, so
        candidates are drawn from the variable-pair incidences."""
        hit = self._satisfiers.get(clause_index)
        if hit is None:
            rights = sorted(abs(lit) - 1
                            for lit in self.phi.clauses[clause_index])
            seen: set[tuple[int, ...]] = set()
            for a, b in itertools.combinations(sorted(set(rights)), 2):
                for comp in self._comps_by_pair().get((a, b), ()):
                    seen.add(comp)
            hit = sorted((c for c in seen
                          if self._clause_allsat(c, clause_index)),
                         key=lambda c: (len(c), c))
            self._satisfiers[clause_index] = hit
        return hit

    def _comps_by_pair(self) -> dict[tuple[int, int], list]:
        hit = self._idx.get("comps_by_pair")
        if hit is None:
            hit = {}
            for comp in self.component_pool():
                rights = sorted(self._vertex_sets(comp)[1])
                for pair in itertools.combinations(rights, 2):
                    hit.setdefault(pair, []).append(comp)
            self._idx["comps_by_pair"] = hit
        return hit

    def _comps_by_right(self) -> dict[int, list]:
        hit = self._idx.get("comps_by_right")
        if hit is None:
            hit = {}
            for comp in self.component_pool():
                for r in self._vertex_sets(comp)[1]:
                    hit.setdefault(r, []).append(comp)
            self._idx["comps_by_right"] = hit
        return hit

    def viable_components(self) -> frozenset:
        """The largest set of components usable as factors.

        A component stays when its rows falsify no clause, every clause
        holding two of its variables off its path is satisfied row by
        row, and for each remaining clause and each variable outside its
        domain some disjoint surviving component serves it.  Pre-cover
        components are kept unconditionally: the game state forces them.
        """
        if self._viable_set is not None:
            return self._viable_set
        pre = set(self.cover.matching.components)
        pre_l = left_sets_of(self.cover.matching)
        pre_r = right_sets_of(self.cover.matching)
        alive: set[tuple[int, ...]] = set(pre)
        for comp in self.component_pool():
            if comp in pre:
                continue
            cl, cr = self._vertex_sets(comp)
            if (cl & pre_l) or (cr & pre_r):
                continue
            if not self._consistent(comp):
                continue
            if any(not self._clause_allsat(comp, i)
                   for i in self._blocking_clauses(comp)):
                continue
            alive.add(comp)

        def served(comp, alive_now):
            cl, cr = self._vertex_sets(comp)
            for i in range(len(self.phi.clauses)):
                if i in cl or i in pre_l:
                    continue
                if self._clause_allsat(comp, i):
                    continue
                if not any(d in alive_now
                           and not (self._vertex_sets(d)[0] & cl)
                           and not (self._vertex_sets(d)[1] & cr)
                           for d in self._satisfier_pool(i)):
                    return False
            for r in range(self.graph.right_count):
                if r in cr or r in pre_r:
                    continue
                if not any(d in alive_now
                           and not (self._vertex_sets(d)[0] & cl)
                           and not (self._vertex_sets(d)[1] & cr)
                           for d in self._comps_by_right().get(r, ())):
                    return False
            return True

        changed = True
        while changed:
            changed = False
            for comp in sorted(alive, key=lambda c: (len(c), c)):
                if comp in pre:
                    continue
                if not served(comp, alive):
                    alive.discard(comp)
                    changed = True
        self._viable_set = frozenset(alive)
        return self._viable_set

    # -- membership --------------------------------------------------

    def _component_ok(self, comp: tuple[int, ...]) -> bool:
        hit = self._valid.get(comp)
        if hit is None:
            hit = validate_vw_matching(self.graph,
                                       VwMatching.of((comp,))).ok
            self._valid[comp] = hit
        return hit

    def is_member(self, matching: VwMatching) -> bool:
        pre = self.cover.matching.components
        pre_l = left_sets_of(self.cover.matching)
        pre_r = right_sets_of(self.cover.matching)
        viable = None if self.cover.enforce_property \
            else self.viable_components()
        seen_l: set[int] = set()
        seen_r: set[int] = set()
        for comp in matching.components:
            if not self._component_ok(comp):
                return False
            cl, cr = self._vertex_sets(comp)
            if (cl & seen_l) or (cr & seen_r):
                return False
            seen_l |= cl
            seen_r |= cr
            if viable is not None and comp not in viable:
                return False
            if comp in pre:
                continue
            if (cl & pre_l) or (cr & pre_r):
                return False
        if self.cover.enforce_property:
            aset = pre_l | frozenset(seen_l)
            bset = pre_r | frozenset(seen_r)
            if Fraction(2) / self.cover.epsilon * len(bset) > self.cover.s:
                return False
            if not _cached_property(self.cover, aset, bset):
                return False
        return True

    # -- extension engine --------------------------------------------

    def _blocked(self, matching: VwMatching
                 ) -> tuple[frozenset[int], frozenset[int]]:
        aset = left_sets_of(self.cover.matching) | left_sets_of(matching)
        bset = right_sets_of(self.cover.matching) | right_sets_of(matching)
        return aset, bset

    def _gate(self, matching: VwMatching, comp: tuple[int, ...]) -> bool:
        if not self.cover.enforce_property:
            return True
        aset, bset = self._blocked(matching)
        cl, cr = self._vertex_sets(comp)
        na, nb = aset | cl, bset | cr
        if Fraction(2) / self.cover.epsilon * len(nb) > self.cover.s:
            return False
        return _cached_property(self.cover, na, nb)

    def _cover_left_enforced(self, matching: VwMatching,
                             l: int) -> VwMatching:
        aset, bset = self._blocked(matching)
        for cand in self._pool(l):
            cl, cr = self._vertex_sets(cand)
            if (cl & aset) or (cr & bset):
                continue
            if not self._gate(matching, cand):
                continue
            return VwMatching.of(matching.components + (cand,))
        raise InconsistencyError("no free component covers L%d" % l)

    def _adjoin_satisfier(self, matching: VwMatching,
                          clause_index: int) -> VwMatching:
        aset, bset = self._blocked(matching)
        viable = self.viable_components()
        for cand in self._satisfier_pool(clause_index):
            if cand not in viable:
                continue
            cl, cr = self._vertex_sets(cand)
            if (cl & aset) or (cr & bset):
                continue
            return VwMatching.of(matching.components + (cand,))
        raise InconsistencyError(
            "no viable component satisfies clause %d" % clause_index)

    def _adjoin_domain(self, matching: VwMatching, r: int) -> VwMatching:
        aset, bset = self._blocked(matching)
        viable = self.viable_components()
        for cand in self._comps_by_right().get(r, ()):
            if cand not in viable:
                continue
            cl, cr = self._vertex_sets(cand)
            if (cl & aset) or (cr & bset):
                continue
            return VwMatching.of(matching.components + (cand,))
        raise InconsistencyError(
            "no viable component brings R%d into the domain" % r)

    def _pre_component(self, side: str, v: int) -> Optional[tuple[int, ...]]:
        for comp in self.cover.matching.components:
            pool = component_left(comp) if side == "L" \
                else component_right(comp)
            if v in pool:
                return comp
        return None

    def extend(self, matching: VwMatching, tag: tuple) -> VwMatching:
        """Answer one axiom from the given member: cover the clause's
        left vertex, or bring the variable's right vertex into the
        domain.  Mirrors a covering move; the component bound gates the
        call exactly as a challenge would be gated."""
        if matching.component_count() >= self.mu:
            raise GameRuleError(
                "extension from %d components at bound %d"
                % (matching.component_count(), self.mu))
        kind = tag[0]
        if kind == "clause":
            l = tag[1]
            if not (0 <= l < self.graph.left_count):
                raise ValidationError("clause index %r out of range" % (l,))
            aset, _ = self._blocked(matching)
            if l in aset:
                pre = self._pre_component("L", l)
                if pre is not None and pre not in matching.components:
                    return VwMatching.of(matching.components + (pre,))
                return matching
            if self.cover.enforce_property:
                return self._cover_left_enforced(matching, l)
            return self._adjoin_satisfier(matching, l)
        if kind in ("square", "complement"):
            v = tag[1]
            if not (1 <= v <= self.graph.right_count):
                raise ValidationError("variable %r out of range" % (v,))
            r = v - 1
            _, bset = self._blocked(matching)
            if r in bset:
                pre = self._pre_component("R", r)
                if pre is not None and pre not in matching.components:
                    return VwMatching.of(matching.components + (pre,))
                return matching
            if self.cover.enforce_property:
                # cover the free neighbors first, as the game response
                # would, so the isolated adjunction keeps the property
                current = matching
                for u in sorted(self.graph.radj[r]):
                    aset, _ = self._blocked(current)
                    if u in aset:
                        continue
                    current = self._cover_left_enforced(current, u)
                _, bset = self._blocked(current)
                if r in bset:
                    return current
                if not self._gate(current, (r,)):
                    raise InconsistencyError(
                        "isolated adjunction of R%d breaks the property" % r)
                return VwMatching.of(current.components + ((r,),))
            return self._adjoin_domain(matching, r)
        raise ValidationError("unknown axiom tag %r" % (tag,))

    # -- enumeration -------------------------------------------------

    def enumerate_members(self, max_rank: int,
                          bound: int = DEFAULT_MEMBER_CAP
                          ) -> list[VwMatching]:
        """All member matchings with at most max_rank components, in
        deterministic order; exceeding the bound is a resource error."""
        empty = VwMatching.of(())
        out = [empty]
        if max_rank <= 0:
            return out
        pool = [c for c in self.component_pool()
                if self.is_member(VwMatching.of((c,)))]

        def grow(prefix: tuple[tuple[int, ...], ...], start: int) -> None:
            if len(out) > bound:
                raise ResourceCapError(
                    "more than %d members at rank <= %d" % (bound, max_rank))
            if len(prefix) == max_rank:
                return
            aset = set()
            bset = set()
            for c in prefix:
                cl, cr = self._vertex_sets(c)
                aset |= cl
                bset |= cr
            for i in range(start, len(pool)):
                cand = pool[i]
                cl, cr = self._vertex_sets(cand)
                if (cl & aset) or (cr & bset):
                    continue
                nxt = prefix + (cand,)
                candidate = VwMatching.of(nxt)
                if len(prefix) == 0 or self.is_member(candidate):
                    out.append(candidate)
                    grow(nxt, i + 1)

        grow((), 0)
        return out


def extract_strategy(phi: Cnf, cover_state: CoverStrategyState,
                     mu: int) -> WinningStrategy:
    """Wrap a cover state over the formula's adjacency graph as a
    strategy whose extensions play covering moves."""
    if mu < 1:
        raise ValidationError("mu must be at least 1")
    if adjacency_graph(phi) != cover_state.graph:
        raise ValidationError(
            "cover state graph is not the adjacency graph of the formula")
    return WinningStrategy(phi=phi, cover=cover_state, mu=mu)


# ---------------------------------------------------------------------------
# checking the winning conditions


@dataclass(frozen=True)
class KWinningReport:
    """Outcome of the definitional check, with the space consequences
    recorded as claimed bounds (not re-derived here)."""

    ok: bool
    k: int
    members_checked: int
    extensions_checked: int
    failure: Optional[str]
    claimed_monomial_space: Optional[Fraction] = None
    claimed_total_space: Optional[Fraction] = None


def _models_axiom(strategy: WinningStrategy, matching: VwMatching,
                  tag: tuple) -> bool:
    """Whether every assignment of the member's family zeroes the tagged
    axiom.  The encoded axioms have fixed shapes, so evaluation has a
    closed form: a clause monomial vanishes exactly when some literal of
    the clause is true, and both axioms of a variable vanish exactly
    when the variable is assigned.  Only the factors meeting the axiom's
    variables matter."""
    kind = tag[0]
    if kind in ("square", "complement"):
        r = tag[1] - 1
        return any(r in strategy._vertex_sets(c)[1]
                   for c in matching.components)
    ci = tag[1]
    clause = strategy.phi.clauses[ci]
    cvars = frozenset(abs(lit) - 1 for lit in clause)
    relevant = [c for c in matching.components
                if cvars & strategy._vertex_sets(c)[1]]
    if any(strategy._clause_allsat(c, ci) for c in relevant):
        return True
    families = [strategy.family_of_component(c).assignments
                for c in relevant]
    for combo in itertools.product(*families):
        hit = False
        for lit in clause:
            for piece in combo:
                if piece.value(lit) == 1:
                    hit = True
                    break
            if hit:
                break
        if not hit:
            return False
    return True


def check_k_winning(phi: Cnf, strategy: WinningStrategy, k: int,
                    enumeration_bound: int = DEFAULT_MEMBER_CAP
                    ) -> KWinningReport:
    """Exhaustively verify the two winning conditions at rank below k.

    Every enumerated member must have all its factor subsets as members
    (restriction), and must extend, for every encoded axiom, to a member
    whose family zeroes that axiom (extension).  The reported claimed
    bounds, k/4 for monomial space and (k-1)^2/4 for total space, are
    consequences of a passing check; they are recorded, not re-proved.
    """
    if k < 0:
        raise ValidationError("k must be non-negative")
    axioms = tagged_axioms(phi)
    members = strategy.enumerate_members(max_rank=max(k - 1, 0),
                                         bound=enumeration_bound)
    extensions = 0

    def fail(text: str) -> KWinningReport:
        return KWinningReport(ok=False, k=k, members_checked=len(members),
                              extensions_checked=extensions, failure=text)

    if k >= 1:
        for matching in members:
            comps = matching.components
            for r in range(len(comps)):
                for combo in itertools.combinations(comps, r):
                    if not strategy.is_member(VwMatching.of(combo)):
                        return fail("restriction fails below %r" % (comps,))
            for tag, _poly in axioms:
                if _models_axiom(strategy, matching, tag):
                    continue
                extensions += 1
                try:
                    bigger = strategy.extend(matching, tag)
                except (InconsistencyError, GameRuleError) as exc:
                    return fail("extension for %r from %r: %s"
                                % (tag, comps, exc))
                if not strategy.is_member(bigger):
                    return fail("extension for %r leaves the strategy"
                                % (tag,))
                if not set(comps) <= set(bigger.components):
                    return fail("extension for %r is not an extension"
                                % (tag,))
                if not _models_axiom(strategy, bigger, tag):
                    return fail("extension for %r does not zero the axiom"
                                % (tag,))
    return KWinningReport(
        ok=True, k=k, members_checked=len(members),
        extensions_checked=extensions, failure=None,
        claimed_monomial_space=Fraction(k, 4),
        claimed_total_space=Fraction((k - 1) ** 2, 4) if k >= 1 else None)


# ---------------------------------------------------------------------------
# piecewise assignments


@dataclass(frozen=True)
class PiecewiseAssignment:
    """Non-empty partial assignments with pairwise disjoint domains."""

    pieces: tuple[PartialAssignment, ...]

    @staticmethod
    def of(pieces: Iterable[PartialAssignment]) -> "PiecewiseAssignment":
        pool = sorted(pieces, key=lambda p: p.pairs)
        seen: set[int] = set()
        for piece in pool:
            if not piece.pairs:
                raise ValidationError("pieces must be non-empty")
            dom = piece.domain()
            if seen & dom:
                raise ValidationError("piece domains overlap")
            seen |= dom
        return PiecewiseAssignment(pieces=tuple(pool))

    def size(self) -> int:
        return len(self.pieces)

    def union(self) -> PartialAssignment:
        merged = LAMBDA
        for piece in self.pieces:
            merged = merged.union(piece)
        return merged

    def sub_assignments(self) -> tuple["PiecewiseAssignment", ...]:
        out = []
        for r in range(len(self.pieces) + 1):
            for combo in itertools.combinations(self.pieces, r):
                out.append(PiecewiseAssignment(pieces=combo))
        return tuple(out)

    def contains(self, other: "PiecewiseAssignment") -> bool:
        return set(other.pieces) <= set(self.pieces)


@dataclass
class RFreeFamily:
    """Piecewise assignments drawn factorwise from strategy members of
    bounded rank; the piece structure is the factor structure."""

    strategy: WinningStrategy
    r: int
    _members: Optional[tuple[PiecewiseAssignment, ...]] = field(
        default=None, repr=False)

    def enumerate_members(self, bound: int = DEFAULT_MEMBER_CAP
                          ) -> tuple[PiecewiseAssignment, ...]:
        if self._members is not None:
            return self._members
        out: set[PiecewiseAssignment] = set()
        for matching in self.strategy.enumerate_members(max_rank=self.r,
                                                        bound=bound):
            families = [self.strategy.family_of_component(c).assignments
                        for c in matching.components]
            for combo in itertools.product(*families):
                out.add(PiecewiseAssignment.of(combo))
                if len(out) > bound:
                    raise ResourceCapError(
                        "more than %d piecewise assignments" % bound)
        self._members = tuple(sorted(
            out, key=lambda a: tuple(p.pairs for p in a.pieces)))
        return self._members

    def is_member(self, alpha: PiecewiseAssignment,
                  bound: int = DEFAULT_MEMBER_CAP) -> bool:
        return alpha in set(self.enumerate_members(bound))


def to_rfree(strategy: WinningStrategy, k: int) -> RFreeFamily:
    """The derived family of piecewise assignments with at most k-1
    pieces, one per factor of a member."""
    if k < 1:
        raise ValidationError("k must be at least 1")
    return RFreeFamily(strategy=strategy, r=k - 1)


@dataclass(frozen=True)
class RFreeReport:
    ok: bool
    r: int
    members_checked: int
    failure: Optional[str]
    claimed_total_space: Optional[Fraction] = None


def check_rfree(phi: Cnf,
                family: Union[RFreeFamily, Iterable[PiecewiseAssignment]],
                r: int, enumeration_bound: int = DEFAULT_MEMBER_CAP
                ) -> RFreeReport:
    """Verify the three defining properties of the family.

    Consistency: no member falsifies a clause of the formula.
    Retraction: every sub-assignment of a member is a member.
    Extension: a member with fewer than r pieces extends, for every
    variable outside its domain, to members setting it to 0 and to 1.
    """
    if r < 0:
        raise ValidationError("r must be non-negative")
    if isinstance(family, RFreeFamily):
        members = family.enumerate_members(enumeration_bound)
    else:
        members = tuple(family)
        if len(members) > enumeration_bound:
            raise ResourceCapError("family larger than the bound")
    if not members:
        return RFreeReport(ok=False, r=r, members_checked=0,
                           failure="family is empty")
    member_set = set(members)

    def fail(text: str) -> RFreeReport:
        return RFreeReport(ok=False, r=r, members_checked=len(members),
                           failure=text)

    clauses_by_var: dict[int, list[int]] = {}
    for i, clause in enumerate(phi.clauses):
        for lit in clause:
            clauses_by_var.setdefault(abs(lit), []).append(i)

    by_var: dict[tuple[int, int], list[PiecewiseAssignment]] = {}
    for alpha in members:
        merged = alpha.union().as_dict()
        hit_clauses = sorted({i for v in merged
                              for i in clauses_by_var.get(v, ())})
        for i in hit_clauses:
            if evaluate_clause(phi.clauses[i], merged) is False:
                return fail("%r falsifies clause %d" % (alpha, i))
        for piece_subset in alpha.sub_assignments():
            if piece_subset not in member_set:
                return fail("retraction fails below %r" % (alpha,))
        for v, val in merged.items():
            by_var.setdefault((v, val), []).append(alpha)

    for alpha in members:
        if alpha.size() >= r:
            continue
        dom = alpha.union().domain()
        for v in range(1, phi.variable_count + 1):
            if v in dom:
                continue
            for val in (0, 1):
                found = any(beta.contains(alpha)
                            for beta in by_var.get((v, val), ()))
                if not found:
                    return fail("no extension of %r with x%d=%d"
                                % (alpha, v, val))
    return RFreeReport(ok=True, r=r, members_checked=len(members),
                       failure=None,
                       claimed_total_space=Fraction(r * r, 4))


# ---------------------------------------------------------------------------
# certificates


def _family_rows(family: FlippableFamily) -> tuple[tuple[int, ...], str]:
    variables = tuple(sorted(family.domain()))
    rows = sorted("".join(str(a.get(v)) for v in variables)
                  for a in family.assignments)
    return variables, " ".join(rows)


def _member_digest(strategy: WinningStrategy, max_rank: int,
                   bound: int) -> tuple[int, str]:
    members = strategy.enumerate_members(max_rank=max_rank, bound=bound)
    blob = "\n".join(repr(m.components) for m in members)
    return len(members), hashlib.sha256(blob.encode()).hexdigest()


def write_kwin_certificate(strategy: WinningStrategy, k: int,
                           bound: int = DEFAULT_MEMBER_CAP) -> str:
    """Serialize the strategy parameters, a digest of the member set at
    rank below k, and one sample component family per clause vertex."""
    cover = strategy.cover
    count, digest = _member_digest(strategy, max(k - 1, 0), bound)
    lines = [
        "c k-winning certificate",
        "p kwin %d" % k,
        "x epsilon %d/%d" % (cover.epsilon.numerator,
                             cover.epsilon.denominator),
        "x s %d" % cover.s,
        "x threshold %d" % cover.degree_threshold,
        "x mu %d" % strategy.mu,
        "x enforce %d" % int(cover.enforce_property),
        "x members %d" % count,
        "x digest %s" % digest,
    ]
    for l in range(strategy.graph.left_count):
        pool = strategy._pool(l)
        if not pool:
            continue
        comp = pool[0]
        variables, rows = _family_rows(strategy.family_of_component(comp))
        lines.append("t %d : %s : %s : %s"
                     % (l, " ".join(str(x) for x in comp),
                        " ".join(str(v) for v in variables), rows))
    return "\n".join(lines) + "\n"


def parse_kwin_certificate(text: str) -> dict:
    """Read back the fields of a certificate into a dict."""
    out: dict = {"tables": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "p":
                if len(parts) != 3 or parts[1] != "kwin":
                    raise FormatError("line %d: bad header" % lineno)
                out["k"] = int(parts[2])
            elif parts[0] == "x" and len(parts) == 3:
                if parts[1] == "epsilon":
                    num, _, den = parts[2].partition("/")
                    out["epsilon"] = Fraction(int(num), int(den or "1"))
                elif parts[1] == "digest":
                    out["digest"] = parts[2]
                else:
                    out[parts[1]] = int(parts[2])
            elif parts[0] == "t":
                body = line[1:].strip()
                left, comp, variables, rows = (
                    piece.strip() for piece in body.split(":"))
                out["tables"].append((
                    int(left),
                    tuple(int(x) for x in comp.split()),
                    tuple(int(x) for x in variables.split()),
                    tuple(rows.split())))
            else:
                raise FormatError("line %d: unknown record %r"
                                  % (lineno, line))
        except FormatError:
            raise
        except (ValueError, IndexError) as exc:
            raise FormatError("line %d: %s" % (lineno, exc)) from exc
    for key in ("k", "epsilon", "s", "threshold", "mu", "enforce",
                "members", "digest"):
        if key not in out:
            raise FormatError("certificate misses field %r" % key)
    return out


def verify_kwin_certificate(phi: Cnf, text: str,
                            bound: int = DEFAULT_MEMBER_CAP
                            ) -> KWinningReport:
    """Rebuild the strategy from the certificate parameters and check
    everything it asserts: the member digest, the sample family tables,
    and the winning conditions themselves."""
    from .covergame import init_cover

    data = parse_kwin_certificate(text)
    graph = adjacency_graph(phi)
    cover = init_cover(graph, data["epsilon"], data["threshold"], data["s"],
                       strict=False,
                       enforce_property=bool(data["enforce"]))
    strategy = extract_strategy(phi, cover, data["mu"])
    k = data["k"]
    count, digest = _member_digest(strategy, max(k - 1, 0), bound)

    def fail(text_: str) -> KWinningReport:
        return KWinningReport(ok=False, k=k, members_checked=count,
                              extensions_checked=0, failure=text_)

    if count != data["members"]:
        return fail("member count %d != %d" % (count, data["members"]))
    if digest != data["digest"]:
        return fail("member digest mismatch")
    for left, comp, variables, rows in data["tables"]:
        pool = strategy._pool(left)
        if not pool or tuple(pool[0]) != comp:
            return fail("table component for L%d mismatches" % left)
        want_vars, want_rows = _family_rows(
            strategy.family_of_component(comp))
        if want_vars != variables or tuple(want_rows.split()) != rows:
            return fail("table family for L%d mismatches" % left)
    return check_k_winning(phi, strategy, k, enumeration_bound=bound)
