"""A two-player covering game on bipartite graphs.

Choose challenges vertices; Cover maintains a VW-matching that must be
extended, component by component, to cover every challenged vertex.  The
heart of the module is the matching-property oracle: a pair (A, B) of
deleted vertex sets has the property when every small enough left subset
outside A still has a VW-cover in the remaining graph.  Cover's strategy
pre-covers all high-degree right vertices once, then answers challenges
by enumerating the few connected candidate components through the
challenged vertex and keeping the first one the oracle accepts.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Union

from .errors import (
    FormatError,
    GameRuleError,
    HypothesisError,
    InconsistencyError,
    ResourceCapError,
    ValidationError,
)
from .graph import (
    BipartiteGraph,
    VwMatching,
    as_fraction,
    canonical_component,
    component_left,
    component_right,
    find_vw_cover,
    is_expander,
    left_sets_of,
    right_sets_of,
    validate_vw_matching,
    vw_components_through_left,
)

__all__ = [
    "PropertyReport",
    "MatchingPropertyCtx",
    "GameHypotheses",
    "CoverStrategyState",
    "GameState",
    "MoveRecord",
    "GameTranscript",
    "TranscriptReport",
    "has_matching_property",
    "smallC_witness",
    "check_game_hypotheses",
    "init_cover",
    "respond",
    "remove_component",
    "play",
    "theorem_mu",
    "write_transcript",
    "parse_transcript",
    "verify_transcript",
]

DEFAULT_SUBSET_CAP = 200_000
DEFAULT_TARGET_CAP = 8192
EPSILON_LIMIT = Fraction(1, 23)

Move = tuple
Challenge = tuple[str, int]


# ---------------------------------------------------------------------------
# the matching property


@dataclass(frozen=True)
class PropertyReport:
    """Verdict of the matching-property oracle.

    witness is an uncoverable challenge set of minimum size when the
    property fails, None when it holds.  subsets_checked counts the
    cover searches performed.
    """

    holds: bool
    witness: Optional[tuple[int, ...]]
    subsets_checked: int


@dataclass(frozen=True)
class MatchingPropertyCtx:
    """A pair of deleted sets together with the size bound and epsilon."""

    a: frozenset[int]
    b: frozenset[int]
    s: int
    epsilon: Fraction

    def budget_left(self) -> Fraction:
        return Fraction(2) / self.epsilon * len(self.b)

    def within_budget(self) -> bool:
        return self.budget_left() <= self.s


def _validate_pair(graph: BipartiteGraph, a: Iterable[int],
                   b: Iterable[int]) -> tuple[frozenset[int], frozenset[int]]:
    aset = frozenset(a)
    bset = frozenset(b)
    for v in aset:
        if not (0 <= v < graph.left_count):
            raise ValidationError("left vertex %r out of range" % v)
    for v in bset:
        if not (0 <= v < graph.right_count):
            raise ValidationError("right vertex %r out of range" % v)
    return aset, bset


def _strict_bound(b_size: int, epsilon: Fraction) -> int:
    """Largest integer strictly below 2|B|/epsilon (possibly -1)."""
    q = Fraction(2 * b_size) / epsilon
    return math.ceil(q) - 1


def _connected_subsets(neigh: dict[int, frozenset[int]], size: int,
                       budget: list[int]) -> list[tuple[int, ...]]:
    """All neighborhood-connected subsets of the key set with the given
    size, sorted.  Connectivity means the shares-a-right-neighbor graph
    on the chosen vertices is connected; a minimum-size uncoverable set
    is always of this kind, because disjoint-neighborhood parts could be
    covered independently."""
    verts = sorted(neigh)
    out: set[tuple[int, ...]] = set()

    def grow(chosen: list[int], reach: frozenset[int]) -> None:
        if budget[0] <= 0:
            raise ResourceCapError("connected-subset enumeration cap hit")
        budget[0] -= 1
        if len(chosen) == size:
            out.add(tuple(chosen))
            return
        floor = chosen[0]
        for v in verts:
            if v <= floor or v in chosen:
                continue
            if not (neigh[v] & reach):
                continue
            grow(sorted(chosen + [v]), reach | neigh[v])

    for v in verts:
        grow([v], neigh[v])
    return sorted(out)


def has_matching_property(graph: BipartiteGraph, a: Iterable[int],
                          b: Iterable[int], s: int, epsilon,
                          expander_verified: bool = False,
                          subset_cap: int = DEFAULT_SUBSET_CAP
                          ) -> PropertyReport:
    """Exact verdict for the matching property of the pair (A, B).

    The property asks for a VW-cover of every C inside L minus A with
    |C| <= s, in the graph with A and B deleted.  Coverability is
    monotone under taking subsets, so the verdict only needs the largest
    size; the witness search walks sizes upward and only through
    neighborhood-connected sets, where every minimum-size failure lives.

    When expander_verified the caller asserts the graph expands by
    2 - epsilon/2 up to size s, which confines any failure to sets
    smaller than 2|B|/epsilon; this requires epsilon < 1/23.
    """
    aset, bset = _validate_pair(graph, a, b)
    eps = as_fraction(epsilon)
    if eps <= 0:
        raise ValidationError("epsilon must be positive")
    if s < 0:
        raise ValidationError("s must be non-negative")
    if expander_verified and eps >= EPSILON_LIMIT:
        raise ValidationError(
            "size pruning is only sound for epsilon < 1/23")

    rest = [l for l in range(graph.left_count) if l not in aset]
    k_cap = min(s, len(rest))
    if expander_verified:
        k_cap = min(k_cap, max(0, _strict_bound(len(bset), eps)))
    if k_cap == 0:
        return PropertyReport(holds=True, witness=None, subsets_checked=0)

    checked = 0

    def coverable(targets: tuple[int, ...]) -> bool:
        nonlocal checked
        checked += 1
        cover = find_vw_cover(graph, targets, banned_left=aset,
                              banned_right=bset,
                              cap=max(DEFAULT_TARGET_CAP, len(targets)))
        return cover is not None

    top_count = math.comb(len(rest), k_cap)
    failed = None
    if top_count <= subset_cap:
        for combo in itertools.combinations(rest, k_cap):
            if not coverable(combo):
                failed = combo
                break
        if failed is None:
            return PropertyReport(holds=True, witness=None,
                                  subsets_checked=checked)

    # either a top-size set failed or the top layer is too wide to sweep:
    # walk sizes upward through connected sets to pin a minimum failure
    neigh = {l: frozenset(r for r in graph.adj[l] if r not in bset)
             for l in rest}
    budget = [subset_cap]
    for size in range(1, k_cap + 1):
        layer = _connected_subsets(neigh, size, budget)
        if not layer:
            # a connected set of any larger size would contain one of
            # this size, so nothing further can fail
            break
        for combo in layer:
            if not coverable(combo):
                return PropertyReport(holds=False, witness=combo,
                                      subsets_checked=checked)
    if failed is not None:
        raise InconsistencyError(
            "a full-size set is uncoverable, yet no connected set is")
    return PropertyReport(holds=True, witness=None, subsets_checked=checked)


def smallC_witness(graph: BipartiteGraph, a: Iterable[int], b: Iterable[int],
                   s: int, epsilon,
                   subset_cap: int = DEFAULT_SUBSET_CAP
                   ) -> Optional[tuple[int, ...]]:
    """A minimum uncoverable challenge set of the pair, or None.

    The caller must have verified the (s, 2 - epsilon/2) expansion of
    the graph; under that hypothesis a failing pair always has a witness
    strictly smaller than 2|B|/epsilon, and that is the only region
    searched.
    """
    report = has_matching_property(graph, a, b, s, epsilon,
                                   expander_verified=True,
                                   subset_cap=subset_cap)
    if report.holds:
        return None
    witness = report.witness
    assert witness is not None
    eps = as_fraction(epsilon)
    assert Fraction(len(witness)) < Fraction(2 * len(frozenset(b))) / eps
    assert find_vw_cover(graph, witness, banned_left=frozenset(a),
                         banned_right=frozenset(b),
                         cap=max(DEFAULT_TARGET_CAP, len(witness))) is None
    return witness


# ---------------------------------------------------------------------------
# hypotheses and the pre-cover


@dataclass(frozen=True)
class GameHypotheses:
    """Itemized checks backing Cover's strategy on a given graph."""

    ok: bool
    items: tuple[tuple[str, bool, str], ...]

    def item(self, name: str) -> tuple[str, bool, str]:
        for entry in self.items:
            if entry[0] == name:
                return entry
        raise KeyError(name)


def _high_degree_sets(graph: BipartiteGraph, threshold: int
                      ) -> dict[int, tuple[int, ...]]:
    """S_d for every d from the threshold to the maximum right degree:
    the right vertices of degree strictly bigger than d."""
    degs = [len(graph.radj[r]) for r in range(graph.right_count)]
    maxdeg = max(degs, default=0)
    out: dict[int, tuple[int, ...]] = {}
    for d in range(threshold, maxdeg + 1):
        out[d] = tuple(r for r in range(graph.right_count) if degs[r] > d)
    return out


def check_game_hypotheses(graph: BipartiteGraph, epsilon, degree_threshold: int,
                          s: int, expander_cap: int = 20,
                          assume_expander: bool = False) -> GameHypotheses:
    """The three structural hypotheses behind Cover's winning strategy.

    Expansion is verified exhaustively only up to min(s, |L|,
    expander_cap); if that truncates the range the item fails unless the
    caller vouches for the graph with assume_expander (for instance
    because neighborhoods are disjoint by construction).
    """
    eps = as_fraction(epsilon)
    items: list[tuple[str, bool, str]] = []

    deg_ok = all(len(graph.adj[l]) == 3 for l in range(graph.left_count))
    items.append(("left degree exactly 3", deg_ok,
                  "" if deg_ok else "some left vertex has degree != 3"))

    want = min(s, graph.left_count)
    if assume_expander:
        items.append(("(s, 2-eps/2) expansion", True, "asserted by caller"))
    else:
        s_chk = min(want, expander_cap)
        if s_chk < 1:
            items.append(("(s, 2-eps/2) expansion", False, "s < 1"))
        else:
            ok, witness = is_expander(graph, s_chk, 2 - eps / 2,
                                      cap=expander_cap)
            if not ok:
                items.append(("(s, 2-eps/2) expansion", False,
                              "violated by %r" % (witness,)))
            elif s_chk < want:
                items.append(("(s, 2-eps/2) expansion", False,
                              "verified only up to %d of %d" % (s_chk, want)))
            else:
                items.append(("(s, 2-eps/2) expansion", True, ""))

    sets = _high_degree_sets(graph, degree_threshold)
    conc_ok, detail = True, ""
    for d in sorted(sets):
        lhs = Fraction(72 * d) / eps * (len(sets[d]) + d) + 1
        if lhs > Fraction(s, 2):
            conc_ok, detail = False, "fails at degree %d" % d
            break
    if not sets and not detail:
        detail = "no degree exceeds the threshold"
    items.append(("72d/eps(|S_d|+d)+1 <= s/2 on [D, max degree]", conc_ok,
                  detail))

    return GameHypotheses(ok=all(h for _, h, _ in items), items=tuple(items))


@dataclass
class CoverStrategyState:
    """Cover's static data: the pre-cover M over high-degree right
    vertices and everything needed to run the matching-property oracle.

    With enforce_property off, candidate components are accepted on
    validity and disjointness alone; the oracle and the cardinality
    budget are bypassed.  That mode serves exercises on graphs too dense
    for any pair to have the matching property.
    """

    graph: BipartiteGraph
    epsilon: Fraction
    degree_threshold: int
    s: int
    matching: VwMatching
    high_degree: dict[int, tuple[int, ...]]
    hypotheses: GameHypotheses
    expander_verified: bool
    enforce_property: bool = True
    property_cache: dict = field(default_factory=dict, repr=False)

    def base_ctx(self) -> MatchingPropertyCtx:
        return MatchingPropertyCtx(a=left_sets_of(self.matching),
                                   b=right_sets_of(self.matching),
                                   s=self.s, epsilon=self.epsilon)


def _cached_property(strategy: CoverStrategyState, aset: frozenset[int],
                     bset: frozenset[int]) -> bool:
    if not strategy.enforce_property:
        return True
    key = (aset, bset)
    hit = strategy.property_cache.get(key)
    if hit is None:
        verified = (strategy.expander_verified
                    and strategy.epsilon < EPSILON_LIMIT)
        hit = has_matching_property(strategy.graph, aset, bset, strategy.s,
                                    strategy.epsilon,
                                    expander_verified=verified).holds
        strategy.property_cache[key] = hit
    return hit


def _components_through_right(graph: BipartiteGraph, v: int,
                              banned_left: frozenset[int],
                              banned_right: frozenset[int]
                              ) -> list[tuple[int, ...]]:
    """Candidate connected components covering right vertex v: V-shapes,
    then W-shapes, then the isolated vertex as a last resort."""
    out: set[tuple[int, ...]] = set()
    lefts = [l for l in graph.radj[v] if l not in banned_left]
    for l in lefts:
        for r2 in graph.adj[l]:
            if r2 != v and r2 not in banned_right:
                out.add(canonical_component((v, l, r2)))
    wides: set[tuple[int, ...]] = set()
    for l1 in lefts:
        nbr1 = [r for r in graph.adj[l1] if r not in banned_right]
        for r1 in nbr1:
            for l2 in graph.radj[r1]:
                if l2 == l1 or l2 in banned_left:
                    continue
                nbr2 = [r for r in graph.adj[l2] if r not in banned_right]
                for r0 in nbr1:
                    if r0 == r1:
                        continue
                    for r2 in nbr2:
                        if r2 in (r0, r1):
                            continue
                        comp = canonical_component((r0, l1, r1, l2, r2))
                        if v in component_right(comp):
                            wides.add(comp)
    ranked = [(0, c) for c in out] + [(1, c) for c in wides]
    ranked.sort()
    return [c for _, c in ranked] + [(v,)]


def init_cover(graph: BipartiteGraph, epsilon, degree_threshold: int, s: int,
               strict: bool = True, expander_cap: int = 20,
               assume_expander: bool = False,
               enforce_property: bool = True) -> CoverStrategyState:
    """Build Cover's pre-cover M over all right vertices of degree above
    the threshold, working downward from the highest degree.

    Each high-degree vertex is covered by the first candidate component
    that keeps the matching property and the cardinality budget
    (2/eps)|R(M)| <= s; one component per vertex keeps |R(M)| within
    3 |S_D|.  With strict=True any failed hypothesis is an itemized
    rejection; strict=False records the failures and proceeds, for
    exercises below the theorem's scale.
    """
    eps = as_fraction(epsilon)
    if not (0 < eps < EPSILON_LIMIT):
        raise ValidationError("epsilon must lie in (0, 1/23)")
    if degree_threshold < 1:
        raise ValidationError("degree threshold must be at least 1")
    if s < 1:
        raise ValidationError("s must be at least 1")

    hyps = check_game_hypotheses(graph, eps, degree_threshold, s,
                                 expander_cap=expander_cap,
                                 assume_expander=assume_expander)
    if strict and not hyps.ok:
        broken = [name for name, holds, _ in hyps.items if not holds]
        raise HypothesisError("hypotheses failed: %s" % "; ".join(broken),
                              items=broken)

    sets = _high_degree_sets(graph, degree_threshold)
    strategy = CoverStrategyState(
        graph=graph, epsilon=eps, degree_threshold=degree_threshold, s=s,
        matching=VwMatching.of(()), high_degree=sets, hypotheses=hyps,
        expander_verified=hyps.item("(s, 2-eps/2) expansion")[1],
        enforce_property=enforce_property)

    degs = [len(graph.radj[r]) for r in range(graph.right_count)]
    pending = sorted((r for r in range(graph.right_count)
                      if degs[r] > degree_threshold),
                     key=lambda r: (-degs[r], r))
    comps: list[tuple[int, ...]] = []
    covered_r: set[int] = set()
    aset: frozenset[int] = frozenset()
    bset: frozenset[int] = frozenset()
    for v in pending:
        if v in covered_r:
            continue
        placed = False
        for cand in _components_through_right(graph, v, aset, bset):
            na = aset | frozenset(component_left(cand))
            nb = bset | frozenset(component_right(cand))
            if strategy.enforce_property and Fraction(2) / eps * len(nb) > s:
                continue
            if not _cached_property(strategy, na, nb):
                continue
            comps.append(cand)
            covered_r.update(component_right(cand))
            aset, bset = na, nb
            placed = True
            break
        if not placed:
            raise InconsistencyError(
                "no property-preserving component covers R%d" % v)

    matching = VwMatching.of(comps)
    strategy.matching = matching
    report = validate_vw_matching(graph, matching)
    assert report.ok, report.reason

    high = set(sets.get(degree_threshold, ()))
    assert high <= set(right_sets_of(matching)), "pre-cover misses S_D"
    assert len(right_sets_of(matching)) <= 3 * len(pending), \
        "pre-cover larger than 3|S_D|"
    blocked_l = left_sets_of(matching)
    blocked_r = right_sets_of(matching)
    for r in range(graph.right_count):
        if r in blocked_r:
            continue
        induced = sum(1 for l in graph.radj[r] if l not in blocked_l)
        assert induced <= degree_threshold, \
            "leftover right vertex above the threshold"
    return strategy


# ---------------------------------------------------------------------------
# the game


@dataclass(frozen=True)
class MoveRecord:
    """One applied move and the matching that resulted from it."""

    move: Move
    components: tuple[tuple[int, ...], ...]
    pi_size: Optional[int] = None
    pi_bound: Optional[int] = None
    budget: Optional[Fraction] = None


@dataclass
class GameState:
    """Mutable per-game state: the strategy data, the bound, the current
    matching, and the move log."""

    strategy: CoverStrategyState
    mu: int
    mu_source: str
    matching: VwMatching
    records: list[MoveRecord] = field(default_factory=list)

    def component_count(self) -> int:
        return self.matching.component_count()


def theorem_mu(epsilon, s: int, degree_threshold: int) -> int:
    """The component bound eps*s/(144 D), floored to an integer."""
    eps = as_fraction(epsilon)
    return math.floor(eps * s / (144 * degree_threshold))


def _pair_of(state: GameState) -> tuple[frozenset[int], frozenset[int]]:
    strat = state.strategy
    aset = left_sets_of(strat.matching) | left_sets_of(state.matching)
    bset = right_sets_of(strat.matching) | right_sets_of(state.matching)
    return aset, bset


def _max_free_right_degree(graph: BipartiteGraph,
                           bset: frozenset[int]) -> int:
    best = 0
    for r in range(graph.right_count):
        if r not in bset:
            best = max(best, len(graph.radj[r]))
    return best


def _record(state: GameState, move: Move, pi_size: Optional[int] = None,
            pi_bound: Optional[int] = None) -> None:
    _, bset = _pair_of(state)
    budget = Fraction(2) / state.strategy.epsilon * len(bset)
    state.records.append(MoveRecord(
        move=move, components=state.matching.components,
        pi_size=pi_size, pi_bound=pi_bound, budget=budget))


def _adjoin(state: GameState, comp: tuple[int, ...]) -> None:
    state.matching = VwMatching.of(state.matching.components + (comp,))


def _component_of(matching: VwMatching, side: str, v: int
                  ) -> Optional[tuple[int, ...]]:
    for comp in matching.components:
        pool = component_left(comp) if side == "L" else component_right(comp)
        if v in pool:
            return comp
    return None


def _extend_through_left(state: GameState, v: int) -> tuple[int, int]:
    """Adjoin the first property-preserving connected component through
    left vertex v; returns the candidate count and its bound."""
    strat = state.strategy
    aset, bset = _pair_of(state)
    pool = vw_components_through_left(strat.graph, v, banned_left=aset,
                                      banned_right=bset)
    pool.sort(key=lambda c: (len(c), c))
    d = max(1, _max_free_right_degree(strat.graph, bset))
    assert len(pool) <= 12 * d, "candidate pool exceeds 12d"
    for cand in pool:
        na = aset | frozenset(component_left(cand))
        nb = bset | frozenset(component_right(cand))
        if strat.enforce_property \
                and Fraction(2) / strat.epsilon * len(nb) > strat.s:
            continue
        if not _cached_property(strat, na, nb):
            continue
        _adjoin(state, cand)
        return len(pool), 12 * d
    raise InconsistencyError(
        "no property-preserving component covers L%d" % v)


def respond(state: GameState, challenge: Challenge) -> VwMatching:
    """Answer a challenge, extending the current matching.

    A vertex already covered leaves the matching unchanged; a vertex
    covered by the pre-cover M adjoins that whole component of M; any
    other left vertex is covered through its candidate pool; any other
    right vertex is answered by first covering its uncovered neighbors
    and then, if none of those components touched it, by adjoining it as
    an isolated component (its neighborhood now being fully covered).
    """
    side, v = challenge
    strat = state.strategy
    if side not in ("L", "R"):
        raise ValidationError("challenge side must be 'L' or 'R'")
    limit = strat.graph.left_count if side == "L" else strat.graph.right_count
    if not (0 <= v < limit):
        raise ValidationError("challenged vertex %r out of range" % v)
    if state.component_count() >= state.mu:
        raise GameRuleError(
            "challenge with %d components at bound %d"
            % (state.component_count(), state.mu))

    before = state.matching
    fl, fr = left_sets_of(before), right_sets_of(before)
    covered = v in (fl if side == "L" else fr)
    pi_size = pi_bound = None
    try:
        if not covered:
            mcomp = _component_of(strat.matching, side, v)
            if mcomp is not None:
                _adjoin(state, mcomp)
            elif side == "L":
                pi_size, pi_bound = _extend_through_left(state, v)
            else:
                for u in sorted(strat.graph.radj[v]):
                    aset, _ = _pair_of(state)
                    if u in aset:
                        continue
                    _extend_through_left(state, u)
                aset, bset = _pair_of(state)
                if v not in bset:
                    nb = bset | {v}
                    over = strat.enforce_property \
                        and Fraction(2) / strat.epsilon * len(nb) > strat.s
                    if over or not _cached_property(strat, aset, nb):
                        raise InconsistencyError(
                            "isolated adjunction of R%d breaks the property"
                            % v)
                    _adjoin(state, (v,))
    except InconsistencyError:
        state.matching = before
        raise

    after = state.matching
    report = validate_vw_matching(strat.graph, after)
    assert report.ok, report.reason
    assert set(before.components) <= set(after.components), "not an extension"
    pool = left_sets_of(after) if side == "L" else right_sets_of(after)
    assert v in pool, "challenge left uncovered"
    _record(state, ("challenge", side, v), pi_size, pi_bound)
    return after


def remove_component(state: GameState, index: int) -> GameState:
    """Drop one connected component, by its position in canonical order."""
    comps = state.matching.components
    if not comps:
        raise ValidationError("no components to remove")
    if not (0 <= index < len(comps)):
        raise ValidationError("component index %r out of range" % index)
    state.matching = VwMatching.of(comps[:index] + comps[index + 1:])
    if state.strategy.hypotheses.ok:
        aset, bset = _pair_of(state)
        if not _cached_property(state.strategy, aset, bset):
            raise InconsistencyError(
                "component removal broke the matching property")
    _record(state, ("remove", index))
    return state


# ---------------------------------------------------------------------------
# transcripts


@dataclass(frozen=True)
class GameTranscript:
    """A finished game: the bound and its source, the move log, whether
    Cover survived, and the strategy data needed to audit the run."""

    mu: int
    mu_source: str
    records: tuple[MoveRecord, ...]
    survived: bool
    loss_reason: Optional[str]
    games_explored: int
    pre_cover: tuple[tuple[int, ...], ...]
    epsilon: Fraction
    s: int
    hypotheses_ok: bool


@dataclass(frozen=True)
class TranscriptReport:
    ok: bool
    failed_move: Optional[int]
    reason: Optional[str]
    moves: int


def write_transcript(transcript: GameTranscript) -> str:
    lines = ["t mu %d %s" % (transcript.mu, transcript.mu_source)]
    for rec in transcript.records:
        move = rec.move
        if move[0] == "challenge":
            lines.append("m challenge %s %d" % (move[1], move[2]))
        else:
            lines.append("m remove %d" % move[1])
        for comp in rec.components:
            lines.append("f " + " ".join(str(x) for x in comp))
    return "\n".join(lines) + "\n"


def parse_transcript(text: str) -> tuple[int, str, tuple[MoveRecord, ...]]:
    """Read back a transcript: the bound, its source, and the move log."""
    mu: Optional[int] = None
    source = "unknown"
    records: list[MoveRecord] = []
    move: Optional[Move] = None
    comps: list[tuple[int, ...]] = []

    def flush() -> None:
        nonlocal move, comps
        if move is not None:
            records.append(MoveRecord(move=move, components=tuple(comps)))
        move, comps = None, []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "t":
                if len(parts) != 4 or parts[1] != "mu":
                    raise FormatError("line %d: bad header" % lineno)
                mu = int(parts[2])
                source = parts[3]
            elif parts[0] == "m":
                flush()
                if parts[1] == "challenge" and len(parts) == 4 \
                        and parts[2] in ("L", "R"):
                    move = ("challenge", parts[2], int(parts[3]))
                elif parts[1] == "remove" and len(parts) == 3:
                    move = ("remove", int(parts[2]))
                else:
                    raise FormatError("line %d: bad move %r" % (lineno, line))
            elif parts[0] == "f":
                if move is None:
                    raise FormatError("line %d: matching before move" % lineno)
                comp = tuple(int(x) for x in parts[1:])
                if len(comp) not in (1, 3, 5):
                    raise FormatError("line %d: bad component size" % lineno)
                comps.append(comp)
            else:
                raise FormatError("line %d: unknown record %r" % (lineno, line))
        except FormatError:
            raise
        except ValueError as exc:
            raise FormatError("line %d: %s" % (lineno, exc)) from exc
    flush()
    if mu is None:
        raise FormatError("missing 't mu' header")
    return mu, source, tuple(records)


def verify_transcript(graph: BipartiteGraph,
                      transcript: Union[GameTranscript, str],
                      mu: Optional[int] = None) -> TranscriptReport:
    """Replay a transcript against the game rules alone.

    Checks each matching is valid in the graph, challenge moves respect
    the component bound, extend the previous matching and cover the
    challenged vertex, and removal moves drop exactly the named
    component.  Strategy internals are not consulted.
    """
    if isinstance(transcript, str):
        t_mu, _, records = parse_transcript(transcript)
    else:
        t_mu, records = transcript.mu, transcript.records
    bound = mu if mu is not None else t_mu
    if mu is not None and t_mu != mu:
        return TranscriptReport(ok=False, failed_move=None,
                                reason="transcript bound %d != %d" % (t_mu, mu),
                                moves=len(records))

    current = VwMatching.of(())
    for idx, rec in enumerate(records):
        nxt = VwMatching(components=rec.components)
        canonical = VwMatching.of(rec.components)
        if nxt != canonical:
            return TranscriptReport(False, idx, "matching not canonical",
                                    len(records))
        check = validate_vw_matching(graph, nxt)
        if not check.ok:
            return TranscriptReport(False, idx, check.reason, len(records))
        move = rec.move
        if move[0] == "remove":
            k = move[1]
            if not (0 <= k < current.component_count()):
                return TranscriptReport(False, idx, "bad removal index",
                                        len(records))
            expect = VwMatching.of(current.components[:k]
                                   + current.components[k + 1:])
            if nxt != expect:
                return TranscriptReport(False, idx,
                                        "not a removal of component %d" % k,
                                        len(records))
        elif move[0] == "challenge":
            if current.component_count() >= bound:
                return TranscriptReport(False, idx,
                                        "challenge past the component bound",
                                        len(records))
            if not set(current.components) <= set(nxt.components):
                return TranscriptReport(False, idx, "not an extension",
                                        len(records))
            side, v = move[1], move[2]
            pool = left_sets_of(nxt) if side == "L" else right_sets_of(nxt)
            if v not in pool:
                return TranscriptReport(False, idx, "challenge not covered",
                                        len(records))
        else:
            return TranscriptReport(False, idx, "unknown move", len(records))
        current = nxt
    return TranscriptReport(ok=True, failed_move=None, reason=None,
                            moves=len(records))


# ---------------------------------------------------------------------------
# adversaries and full games


def _legal_moves(state: GameState) -> list[Move]:
    moves: list[Move] = []
    if state.component_count() < state.mu:
        for v in range(state.strategy.graph.left_count):
            moves.append(("challenge", "L", v))
        for v in range(state.strategy.graph.right_count):
            moves.append(("challenge", "R", v))
    for k in range(state.component_count()):
        moves.append(("remove", k))
    return moves


def _apply(state: GameState, move: Move) -> None:
    if move[0] == "challenge":
        respond(state, (move[1], move[2]))
    else:
        remove_component(state, move[1])


def _random_adversary(state: GameState, rng: random.Random) -> Optional[Move]:
    moves = _legal_moves(state)
    return rng.choice(moves) if moves else None


def _greedy_adversary(state: GameState, rng: random.Random) -> Optional[Move]:
    graph = state.strategy.graph
    if state.component_count() < state.mu:
        fl = left_sets_of(state.matching)
        fr = right_sets_of(state.matching)
        ranked = sorted(
            ((len(graph.radj[r]), "R", r) for r in range(graph.right_count)
             if r not in fr), key=lambda t: (-t[0], t[2]))
        if ranked:
            _, side, v = ranked[0]
            return ("challenge", side, v)
        for v in range(graph.left_count):
            if v not in fl:
                return ("challenge", "L", v)
    if state.component_count():
        return ("remove", 0)
    return None


def _run_exhaustive(strategy: CoverStrategyState, mu: int, mu_source: str,
                    max_moves: int) -> GameTranscript:
    """Walk the whole game tree to the given depth; any Cover loss stops
    the walk and is reported on the path that produced it."""
    explored = 0
    seen: set[tuple] = set()
    first_path: Optional[list[MoveRecord]] = None

    def walk(matching: VwMatching, depth: int,
             path: list[MoveRecord]) -> Optional[tuple[list[MoveRecord], str]]:
        nonlocal explored, first_path
        if depth == max_moves:
            if first_path is None:
                first_path = list(path)
            return None
        key = (matching.components, depth)
        if key in seen:
            return None
        seen.add(key)
        state = GameState(strategy=strategy, mu=mu, mu_source=mu_source,
                          matching=matching)
        for move in _legal_moves(state):
            probe = GameState(strategy=strategy, mu=mu, mu_source=mu_source,
                              matching=matching)
            explored += 1
            try:
                _apply(probe, move)
            except InconsistencyError as exc:
                if strategy.hypotheses.ok:
                    raise
                return list(path), "losing move %r: %s" % (move, exc)
            loss = walk(probe.matching, depth + 1, path + list(probe.records))
            if loss is not None:
                return loss
        if not _legal_moves(state) and first_path is None:
            first_path = list(path)
        return None

    loss = walk(VwMatching.of(()), 0, [])
    if loss is not None:
        records, reason = loss
        return GameTranscript(
            mu=mu, mu_source=mu_source, records=tuple(records),
            survived=False, loss_reason=reason, games_explored=explored,
            pre_cover=strategy.matching.components, epsilon=strategy.epsilon,
            s=strategy.s, hypotheses_ok=strategy.hypotheses.ok)
    return GameTranscript(
        mu=mu, mu_source=mu_source, records=tuple(first_path or ()),
        survived=True, loss_reason=None, games_explored=explored,
        pre_cover=strategy.matching.components, epsilon=strategy.epsilon,
        s=strategy.s, hypotheses_ok=strategy.hypotheses.ok)


def play(graph: BipartiteGraph, epsilon, degree_threshold: int, s: int,
         adversary: Union[str, Callable] = "random", max_moves: int = 24,
         seed: int = 0, mu: Optional[int] = None, expander_cap: int = 20,
         assume_expander: bool = False) -> GameTranscript:
    """Run one full game (or, for the exhaustive adversary, the whole
    game tree) and return its transcript.

    With mu=None the bound is the theorem value eps*s/(144 D) and the
    hypotheses must all hold; an explicit mu is an exercise override,
    flagged in the transcript, under which failed hypotheses merely
    downgrade a Cover loss from an internal error to a recorded outcome.
    """
    strict = mu is None
    strategy = init_cover(graph, epsilon, degree_threshold, s, strict=strict,
                          expander_cap=expander_cap,
                          assume_expander=assume_expander)
    if mu is None:
        game_mu, mu_source = theorem_mu(epsilon, s, degree_threshold), "formula"
    else:
        if mu < 0:
            raise ValidationError("mu must be non-negative")
        game_mu, mu_source = mu, "override"

    if adversary == "exhaustive":
        return _run_exhaustive(strategy, game_mu, mu_source, max_moves)

    if callable(adversary):
        pick = adversary
    elif adversary == "random":
        pick = _random_adversary
    elif adversary == "greedy-degree":
        pick = _greedy_adversary
    else:
        raise ValidationError("unknown adversary %r" % (adversary,))

    rng = random.Random(seed)
    state = GameState(strategy=strategy, mu=game_mu, mu_source=mu_source,
                      matching=VwMatching.of(()))
    survived, reason = True, None
    for _ in range(max_moves):
        move = pick(state, rng)
        if move is None:
            break
        try:
            _apply(state, move)
        except InconsistencyError as exc:
            if strategy.hypotheses.ok:
                raise
            survived, reason = False, "losing move %r: %s" % (move, exc)
            break
    return GameTranscript(
        mu=game_mu, mu_source=mu_source, records=tuple(state.records),
        survived=survived, loss_reason=reason,
        games_explored=len(state.records),
        pre_cover=strategy.matching.components, epsilon=strategy.epsilon,
        s=strategy.s, hypotheses_ok=strategy.hypotheses.ok)
