"""Bipartite graphs and VW-matchings.

A VW-matching is a subgraph in which every connected component is a path
with at most 4 edges whose endpoints both lie on the right side; isolated
right vertices are allowed as components.  The three component shapes are

    (r0,)                   isolated right vertex
    (r0, l1, r1)            2-edge path, a "V"
    (r0, l1, r1, l2, r2)    4-edge path, a "W"

Components are stored as vertex tuples in path order: even positions are
right-side indices, odd positions left-side indices.  Left and right
vertices are indexed independently from 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .errors import FormatError, ResourceCapError, ValidationError

__all__ = [
    "BipartiteGraph",
    "VwMatching",
    "MatchingReport",
    "build_graph",
    "left_sets_of",
    "right_sets_of",
    "component_left",
    "component_right",
    "canonical_component",
    "validate_vw_matching",
    "find_vw_cover",
    "vw_components_through_left",
    "is_expander",
    "parse_bigraph",
    "write_bigraph",
    "as_fraction",
]

DEFAULT_COVER_CAP = 16
DEFAULT_EXPANDER_CAP = 20


def as_fraction(value) -> Fraction:
    """Coerce an exact numeric value to Fraction; floats are refused."""
    if isinstance(value, float):
        raise ValidationError(
            "refusing float %r: pass an exact rational (Fraction or 'p/q')" % value
        )
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError("bad rational %r" % value) from exc
    raise ValidationError("bad rational %r" % (value,))


@dataclass(frozen=True)
class BipartiteGraph:
    """Immutable bipartite graph with sorted adjacency on both sides."""

    left_count: int
    right_count: int
    adj: tuple[tuple[int, ...], ...]   # left vertex -> sorted right neighbors
    radj: tuple[tuple[int, ...], ...]  # right vertex -> sorted left neighbors

    def left_degree(self, l: int) -> int:
        return len(self.adj[l])

    def right_degree(self, r: int) -> int:
        return len(self.radj[r])

    def neighborhood(self, lefts: Iterable[int]) -> frozenset[int]:
        """Union of right neighborhoods of the given left vertices."""
        out: set[int] = set()
        for l in lefts:
            out.update(self.adj[l])
        return frozenset(out)

    def edges(self) -> list[tuple[int, int]]:
        return [(l, r) for l in range(self.left_count) for r in self.adj[l]]

    def max_right_degree(self) -> int:
        return max((len(ls) for ls in self.radj), default=0)


def build_graph(edge_list: Iterable[tuple[int, int]], left_count: int,
                right_count: int) -> BipartiteGraph:
    """Build a BipartiteGraph from (left, right) pairs.

    Duplicate edges collapse.  Out-of-range endpoints raise ValidationError.
    """
    if left_count < 0 or right_count < 0:
        raise ValidationError("vertex counts must be non-negative")
    fwd: list[set[int]] = [set() for _ in range(left_count)]
    back: list[set[int]] = [set() for _ in range(right_count)]
    for l, r in edge_list:
        if not (0 <= l < left_count):
            raise ValidationError("left index %r out of range [0, %d)" % (l, left_count))
        if not (0 <= r < right_count):
            raise ValidationError("right index %r out of range [0, %d)" % (r, right_count))
        fwd[l].add(r)
        back[r].add(l)
    return BipartiteGraph(
        left_count=left_count,
        right_count=right_count,
        adj=tuple(tuple(sorted(s)) for s in fwd),
        radj=tuple(tuple(sorted(s)) for s in back),
    )


# ---------------------------------------------------------------------------
# components and matchings


def component_left(comp: tuple[int, ...]) -> tuple[int, ...]:
    """Left vertices of a component, in path order."""
    return comp[1::2]


def component_right(comp: tuple[int, ...]) -> tuple[int, ...]:
    """Right vertices of a component, in path order."""
    return comp[0::2]


def canonical_component(comp: tuple[int, ...]) -> tuple[int, ...]:
    """A path reads the same in both directions; keep the smaller reading."""
    rev = comp[::-1]
    return comp if comp <= rev else rev


@dataclass(frozen=True)
class VwMatching:
    """A set of pairwise disjoint path components, canonically ordered."""

    components: tuple[tuple[int, ...], ...]

    @staticmethod
    def of(components: Iterable[tuple[int, ...]]) -> "VwMatching":
        canon = sorted(canonical_component(tuple(c)) for c in components)
        return VwMatching(components=tuple(canon))

    def component_count(self) -> int:
        return len(self.components)

    def is_empty(self) -> bool:
        return not self.components


def left_sets_of(matching: VwMatching) -> frozenset[int]:
    """All left vertices covered by the matching."""
    out: set[int] = set()
    for comp in matching.components:
        out.update(component_left(comp))
    return frozenset(out)


def right_sets_of(matching: VwMatching) -> frozenset[int]:
    """All right vertices used by the matching."""
    out: set[int] = set()
    for comp in matching.components:
        out.update(component_right(comp))
    return frozenset(out)


@dataclass(frozen=True)
class MatchingReport:
    ok: bool
    reason: Optional[str] = None
    component_index: Optional[int] = None


def _component_shape_error(graph: BipartiteGraph, comp: tuple[int, ...]) -> Optional[str]:
    if len(comp) not in (1, 3, 5):
        return "component length %d is not an allowed path shape" % len(comp)
    rights = component_right(comp)
    lefts = component_left(comp)
    for r in rights:
        if not (0 <= r < graph.right_count):
            return "right index %d out of range" % r
    for l in lefts:
        if not (0 <= l < graph.left_count):
            return "left index %d out of range" % l
    if len(set(rights)) != len(rights) or len(set(lefts)) != len(lefts):
        return "repeated vertex inside a component"
    for i in range(len(comp) - 1):
        l, r = (comp[i + 1], comp[i]) if i % 2 == 0 else (comp[i], comp[i + 1])
        if r not in graph.adj[l]:
            return "edge (L%d, R%d) not present in the host graph" % (l, r)
    return None


def validate_vw_matching(graph: BipartiteGraph, matching: VwMatching) -> MatchingReport:
    """Check component shapes, host edges and pairwise disjointness.

    The report names the first violated invariant and the offending
    component index.
    """
    seen_l: set[int] = set()
    seen_r: set[int] = set()
    for i, comp in enumerate(matching.components):
        err = _component_shape_error(graph, comp)
        if err is not None:
            return MatchingReport(ok=False, reason=err, component_index=i)
        lefts, rights = component_left(comp), component_right(comp)
        if seen_l.intersection(lefts):
            return MatchingReport(ok=False, reason="components share a left vertex",
                                  component_index=i)
        if seen_r.intersection(rights):
            return MatchingReport(ok=False, reason="components share a right vertex",
                                  component_index=i)
        seen_l.update(lefts)
        seen_r.update(rights)
    return MatchingReport(ok=True)


# ---------------------------------------------------------------------------
# cover search


def _effective_adj(graph: BipartiteGraph, lefts: Iterable[int],
                   banned_right: frozenset[int]) -> dict[int, tuple[int, ...]]:
    return {l: tuple(r for r in graph.adj[l] if r not in banned_right) for l in lefts}


def find_vw_cover(graph: BipartiteGraph, targets: Iterable[int],
                  banned_left: Iterable[int] = (), banned_right: Iterable[int] = (),
                  cap: int = DEFAULT_COVER_CAP) -> Optional[VwMatching]:
    """Exact search for a VW-matching covering all targets.

    The search runs inside the subgraph with banned_left / banned_right
    removed.  Returns None when no cover exists.  The result is
    deterministic: targets are attacked in ascending order and candidate
    components are tried in lexicographic order.

    Any cover can be trimmed so that every component carries only target
    left-vertices (a component whose second left vertex is not a target
    shrinks to the 2-edge sub-path through the target), so the search only
    builds components out of targets: V-shapes through one target and
    W-shapes pairing two targets.
    """
    banned_l = frozenset(banned_left)
    banned_r = frozenset(banned_right)
    tlist = sorted(set(targets))
    overlap = banned_l.intersection(tlist)
    if overlap:
        raise ValidationError("targets %s are banned" % sorted(overlap))
    for t in tlist:
        if not (0 <= t < graph.left_count):
            raise ValidationError("target %r out of range" % t)
    if len(tlist) > cap:
        raise ResourceCapError(
            "refusing to cover %d targets (cap %d)" % (len(tlist), cap))
    if not tlist:
        return VwMatching(components=())

    eff = _effective_adj(graph, tlist, banned_r)
    # a covered left vertex sits inside its path with two distinct right
    # neighbors, so degree <= 1 is hopeless
    if any(len(eff[t]) < 2 for t in tlist):
        return None

    used_r: set[int] = set()
    chosen: list[tuple[int, ...]] = []

    def candidates(t: int, open_targets: list[int]) -> list[tuple[int, ...]]:
        out = []
        nbrs = eff[t]
        free = [r for r in nbrs if r not in used_r]
        for r0, r1 in itertools.combinations(free, 2):
            out.append((r0, t, r1))
        for t2 in open_targets:
            if t2 == t:
                continue
            free2 = [r for r in eff[t2] if r not in used_r]
            shared = set(free).intersection(free2)
            for mid in shared:
                for r0 in free:
                    if r0 == mid:
                        continue
                    for r2 in free2:
                        if r2 == mid or r2 == r0:
                            continue
                        out.append(canonical_component((r0, t, mid, t2, r2)))
        out = sorted(set(out))
        return out

    def solve(open_targets: list[int]) -> bool:
        if not open_targets:
            return True
        t = open_targets[0]
        for comp in candidates(t, open_targets):
            lefts = component_left(comp)
            rights = component_right(comp)
            used_r.update(rights)
            chosen.append(comp)
            remaining = [x for x in open_targets if x not in lefts]
            if solve(remaining):
                return True
            chosen.pop()
            used_r.difference_update(rights)
        return False

    if solve(tlist):
        return VwMatching.of(chosen)
    return None


def vw_components_through_left(graph: BipartiteGraph, v: int,
                               banned_left: Iterable[int] = (),
                               banned_right: Iterable[int] = ()
                               ) -> list[tuple[int, ...]]:
    """All connected single components covering left vertex v.

    Enumerates V-shapes through v and W-shapes where the partner left
    vertex is any non-banned vertex, inside the subgraph with the banned
    sets removed.  Sorted canonically; used as the candidate pool when a
    cover move must go through v.
    """
    banned_l = frozenset(banned_left)
    banned_r = frozenset(banned_right)
    if v in banned_l:
        raise ValidationError("vertex L%d is banned" % v)
    nbrs = [r for r in graph.adj[v] if r not in banned_r]
    out: set[tuple[int, ...]] = set()
    for r0, r1 in itertools.combinations(nbrs, 2):
        out.add((r0, v, r1))
    for mid in nbrs:
        for l2 in graph.radj[mid]:
            if l2 == v or l2 in banned_l:
                continue
            nbrs2 = [r for r in graph.adj[l2] if r not in banned_r]
            for r0 in nbrs:
                if r0 == mid:
                    continue
                for r2 in nbrs2:
                    if r2 in (mid, r0):
                        continue
                    out.add(canonical_component((r0, v, mid, l2, r2)))
    return sorted(out)


# ---------------------------------------------------------------------------
# expansion


def is_expander(graph: BipartiteGraph, s: int, delta,
                cap: int = DEFAULT_EXPANDER_CAP
                ) -> tuple[bool, Optional[tuple[int, ...]]]:
    """Check |N(X)| >= delta * |X| for every X of size at most s.

    Returns (True, None) or (False, witness) where the witness is a
    smallest violating set, lexicographically first among those.  All
    comparisons are exact rational arithmetic.
    """
    delta = as_fraction(delta)
    if not (1 <= s <= graph.left_count):
        raise ValidationError("s=%r out of range [1, %d]" % (s, graph.left_count))
    if s > cap:
        raise ResourceCapError("refusing expander check at s=%d (cap %d)" % (s, cap))

    n = graph.left_count
    neigh = [frozenset(graph.adj[l]) for l in range(n)]

    # A smallest violating set is always connected in the shares-a-neighbor
    # sense: splitting a disconnected X along a neighborhood gap splits
    # |N(X)| additively, so one part violates on its own and is smaller.
    # The first size k with any witness therefore has only connected
    # witnesses, and branches whose completion is provably disconnected
    # can be pruned without disturbing the (size, lex) order of the answer.

    def extend(prefix: list[int], groups: list[frozenset[int]],
               covered: frozenset[int], k: int, start: int
               ) -> Optional[tuple[int, ...]]:
        if len(prefix) == k:
            if len(groups) == 1 and Fraction(len(covered)) < delta * k:
                return tuple(prefix)
            return None
        # neighborhoods only grow, so a partial set that already meets the
        # size-k demand can never complete into a violation
        if Fraction(len(covered)) >= delta * k:
            return None
        for g in groups:
            if not any(g & neigh[v] for v in range(start, n)):
                # this group can never merge with the vertices still to come,
                # so every completion stays disconnected
                return None
        remaining = k - len(prefix)
        for v in range(start, n - remaining + 1):
            nv = neigh[v]
            merged = nv
            nxt = []
            for g in groups:
                if g & nv:
                    merged = merged | g
                else:
                    nxt.append(g)
            nxt.append(merged)
            hit = extend(prefix + [v], nxt, covered | nv, k, v + 1)
            if hit is not None:
                return hit
        return None

    for k in range(1, s + 1):
        witness = extend([], [], frozenset(), k, 0)
        if witness is not None:
            return False, witness
    return True, None


# ---------------------------------------------------------------------------
# text format


def parse_bigraph(text: str) -> BipartiteGraph:
    """Parse the bigraph text format.

    Header ``p bigraph <left> <right> <edges>``, one ``e <l> <r>`` line per
    edge, ``c`` lines are comments.  The declared edge count must match.
    """
    header = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None:
                raise FormatError("line %d: duplicate header" % lineno)
            if len(parts) != 5 or parts[1] != "bigraph":
                raise FormatError("line %d: bad header %r" % (lineno, line))
            try:
                header = tuple(int(x) for x in parts[2:])
            except ValueError as exc:
                raise FormatError("line %d: bad header %r" % (lineno, line)) from exc
        elif parts[0] == "e":
            if header is None:
                raise FormatError("line %d: edge before header" % lineno)
            if len(parts) != 3:
                raise FormatError("line %d: bad edge %r" % (lineno, line))
            try:
                edges.append((int(parts[1]), int(parts[2])))
            except ValueError as exc:
                raise FormatError("line %d: bad edge %r" % (lineno, line)) from exc
        else:
            raise FormatError("line %d: unknown record %r" % (lineno, line))
    if header is None:
        raise FormatError("missing 'p bigraph' header")
    left, right, count = header
    if len(edges) != count:
        raise FormatError("header declares %d edges, found %d" % (count, len(edges)))
    try:
        return build_graph(edges, left, right)
    except ValidationError as exc:
        raise FormatError(str(exc)) from exc


def write_bigraph(graph: BipartiteGraph, comments: Iterable[str] = ()) -> str:
    """Canonical serialization: comments, header, then sorted edges."""
    lines = ["c %s" % c if c else "c" for c in comments]
    edges = graph.edges()
    lines.append("p bigraph %d %d %d" % (graph.left_count, graph.right_count, len(edges)))
    for l, r in edges:
        lines.append("e %d %d" % (l, r))
    return "\n".join(lines) + "\n"
