"""Hypergraph side of the Hall-type criterion.

A bipartite graph whose left vertices all have degree 2 or 3 and pairwise
distinct neighborhoods translates into a hypergraph with edges of size 2
and 3.  Covering left vertices by VW-paths is then equivalent to a 2-path
cover: an injective choice of a vertex pair inside each edge such that no
pair meets two other chosen pairs.

This module carries that translation, the reducible-configuration
detector, the discharging audit, and the generator for the family of
tight counterexamples (a 6-vertex base, a 12-vertex gadget, and an
amplification step that raises the vertex/edge ratio).
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional

from .errors import (
    FormatError,
    InconsistencyError,
    ResourceCapError,
    ValidationError,
)
from .graph import BipartiteGraph, as_fraction, build_graph

__all__ = [
    "Hypergraph",
    "hypergraph",
    "parse_hgraph",
    "write_hgraph",
    "TwoPathCover",
    "CoverReport",
    "validate_2path_cover",
    "find_2path_cover",
    "covers_strongly",
    "HypergraphView",
    "to_hypergraph",
    "incidence_graph",
    "check_hall_hypotheses",
    "HypothesesReport",
    "ReduciblePattern",
    "PatternMatch",
    "DEFAULT_PATTERNS",
    "patterns_to_json",
    "patterns_from_json",
    "detect_reducible",
    "ChargeLine",
    "ChargeReport",
    "discharge_audit",
    "find_base_hypergraph",
    "find_gadget",
    "amplify",
    "Counterexample",
    "hall_counterexample",
    "hall_verify",
    "HarnessReport",
]

COVER_EDGE_CAP = 64
CACHE_ENV = "VWSPACE_CACHE_DIR"


# ---------------------------------------------------------------------------
# hypergraphs


@dataclass(frozen=True)
class Hypergraph:
    """Hypergraph with edges of size 2 or 3, stored as sorted tuples."""

    vertex_count: int
    edges: tuple[tuple[int, ...], ...]

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def degrees(self) -> tuple[int, ...]:
        out = [0] * self.vertex_count
        for e in self.edges:
            for v in e:
                out[v] += 1
        return tuple(out)

    def edges_at(self, v: int) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self.edges) if v in e)

    def isolated_vertices(self) -> tuple[int, ...]:
        deg = self.degrees()
        return tuple(v for v in range(self.vertex_count) if deg[v] == 0)

    def size2_edges(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self.edges) if len(e) == 2)


def hypergraph(vertex_count: int, edges: Iterable[Iterable[int]]) -> Hypergraph:
    """Validated constructor; edges are normalized to sorted tuples."""
    if vertex_count < 0:
        raise ValidationError("vertex count must be non-negative")
    norm = []
    for e in edges:
        t = tuple(sorted(set(e)))
        if len(t) not in (2, 3):
            raise ValidationError("hyperedge %r must have size 2 or 3" % (tuple(e),))
        if t[0] < 0 or t[-1] >= vertex_count:
            raise ValidationError("hyperedge %r out of range" % (t,))
        norm.append(t)
    return Hypergraph(vertex_count=vertex_count, edges=tuple(norm))


def parse_hgraph(text: str) -> tuple[Hypergraph, Optional[int]]:
    """Parse ``p hgraph <v> <e>`` + ``h v1 v2 [v3]`` lines.

    An optional ``x <vertex>`` line marks a distinguished vertex (used by
    the gadget cache).  Returns (hypergraph, distinguished or None).
    """
    header = None
    edges: list[tuple[int, ...]] = []
    special: Optional[int] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "p":
                if header is not None or len(parts) != 4 or parts[1] != "hgraph":
                    raise FormatError("line %d: bad header %r" % (lineno, line))
                header = (int(parts[2]), int(parts[3]))
            elif parts[0] == "h":
                if header is None:
                    raise FormatError("line %d: edge before header" % lineno)
                if len(parts) not in (3, 4):
                    raise FormatError("line %d: bad edge %r" % (lineno, line))
                edges.append(tuple(int(p) for p in parts[1:]))
            elif parts[0] == "x":
                if len(parts) != 2:
                    raise FormatError("line %d: bad record %r" % (lineno, line))
                special = int(parts[1])
            else:
                raise FormatError("line %d: unknown record %r" % (lineno, line))
        except FormatError:
            raise
        except ValueError as exc:
            raise FormatError("line %d: bad number in %r" % (lineno, line)) from exc
    if header is None:
        raise FormatError("missing 'p hgraph' header")
    if len(edges) != header[1]:
        raise FormatError("header declares %d edges, found %d" % (header[1], len(edges)))
    try:
        h = hypergraph(header[0], edges)
    except ValidationError as exc:
        raise FormatError(str(exc)) from exc
    if special is not None and not (0 <= special < h.vertex_count):
        raise FormatError("distinguished vertex %d out of range" % special)
    return h, special


def write_hgraph(h: Hypergraph, special: Optional[int] = None,
                 comments: Iterable[str] = ()) -> str:
    lines = ["c %s" % c if c else "c" for c in comments]
    lines.append("p hgraph %d %d" % (h.vertex_count, len(h.edges)))
    for e in h.edges:
        lines.append("h " + " ".join(str(v) for v in e))
    if special is not None:
        lines.append("x %d" % special)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# 2-path covers


@dataclass(frozen=True)
class TwoPathCover:
    """Map from edge indices to chosen vertex pairs, sorted by edge."""

    assignment: tuple[tuple[int, tuple[int, int]], ...]

    @staticmethod
    def of(mapping: dict[int, tuple[int, int]]) -> "TwoPathCover":
        items = tuple(sorted((i, tuple(sorted(p))) for i, p in mapping.items()))
        return TwoPathCover(assignment=items)  # type: ignore[arg-type]

    def as_dict(self) -> dict[int, tuple[int, int]]:
        return dict(self.assignment)

    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(p for _, p in self.assignment)


@dataclass(frozen=True)
class CoverReport:
    ok: bool
    reason: Optional[str] = None


def validate_2path_cover(h: Hypergraph, cover: TwoPathCover,
                         target_edges: Iterable[int]) -> CoverReport:
    """Check containment, injectivity, coverage and the no-3-chain rule."""
    targets = set(target_edges)
    mapping = cover.as_dict()
    if set(mapping) != targets:
        return CoverReport(False, "covered edges differ from the target set")
    seen: set[tuple[int, int]] = set()
    for i, pair in mapping.items():
        if not (0 <= i < len(h.edges)):
            return CoverReport(False, "edge index %d out of range" % i)
        if len(set(pair)) != 2 or not set(pair) <= set(h.edges[i]):
            return CoverReport(False, "pair %r is not a 2-subset of edge %d" % (pair, i))
        if pair in seen:
            return CoverReport(False, "pair %r assigned twice" % (pair,))
        seen.add(pair)
    items = sorted(mapping.items())
    for i, pi in items:
        meets = sum(1 for j, pj in items if j != i and set(pi) & set(pj))
        if meets >= 2:
            return CoverReport(False, "pair of edge %d meets two other pairs" % i)
    return CoverReport(True)


def find_2path_cover(h: Hypergraph, target_edges: Optional[Iterable[int]] = None,
                     banned_vertices: Iterable[int] = (),
                     cap: int = COVER_EDGE_CAP) -> Optional[TwoPathCover]:
    """Exact backtracking search for a 2-path cover of the target edges.

    ``banned_vertices`` restricts the chosen pairs (not the edges), which
    is how "a cover avoiding x" is expressed.  Deterministic: edges in
    index order, candidate pairs in lexicographic order.
    """
    if target_edges is None:
        targets = list(range(len(h.edges)))
    else:
        targets = sorted(set(target_edges))
    for i in targets:
        if not (0 <= i < len(h.edges)):
            raise ValidationError("edge index %r out of range" % (i,))
    if len(targets) > cap:
        raise ResourceCapError(
            "refusing 2-path cover over %d edges (cap %d)" % (len(targets), cap))
    banned = frozenset(banned_vertices)

    options: list[list[tuple[int, int]]] = []
    for i in targets:
        allowed = [v for v in h.edges[i] if v not in banned]
        opts = [tuple(p) for p in itertools.combinations(sorted(allowed), 2)]
        if not opts:
            return None
        options.append(opts)

    chosen: dict[int, tuple[int, int]] = {}
    used: set[tuple[int, int]] = set()
    meet_count: dict[int, int] = {}

    def place(pos: int) -> bool:
        if pos == len(targets):
            return True
        edge = targets[pos]
        for pair in options[pos]:
            if pair in used:
                continue
            touching = [j for j, q in chosen.items() if set(pair) & set(q)]
            if len(touching) > 1:
                continue
            if touching and meet_count[touching[0]] >= 1:
                continue
            chosen[edge] = pair
            used.add(pair)
            meet_count[edge] = len(touching)
            if touching:
                meet_count[touching[0]] += 1
            if place(pos + 1):
                return True
            del chosen[edge]
            used.discard(pair)
            del meet_count[edge]
            if touching:
                meet_count[touching[0]] -= 1
        return False

    if place(0):
        return TwoPathCover.of(chosen)
    return None


def covers_strongly(h: Hypergraph, vertex: int,
                    target_edges: Optional[Iterable[int]] = None) -> bool:
    """True if every 2-path cover of the targets "pins" the vertex.

    Pinned means: appending one more pair through the vertex would always
    break the no-3-chain rule.  Equivalently, the hypergraph extended by a
    fresh pendant edge at the vertex has no cover, which is how we test it.
    """
    if target_edges is None:
        targets = list(range(len(h.edges)))
    else:
        targets = sorted(set(target_edges))
    fresh = h.vertex_count
    extended = Hypergraph(vertex_count=fresh + 1,
                          edges=h.edges + ((vertex, fresh),))
    return find_2path_cover(extended, targets + [len(h.edges)]) is None


# ---------------------------------------------------------------------------
# bipartite translation


@dataclass(frozen=True)
class HypergraphView:
    """to_hypergraph output: the hypergraph plus both index bijections."""

    hypergraph: Hypergraph
    edge_of_left: tuple[int, ...]
    vertex_of_right: tuple[Optional[int], ...]
    right_of_vertex: tuple[int, ...]


def to_hypergraph(graph: BipartiteGraph) -> HypergraphView:
    """Translate a bipartite graph into its neighborhood hypergraph.

    Vertices are the right vertices that occur in some neighborhood,
    compacted; edge i is the neighborhood of left vertex i.  Requires
    left degrees in {2, 3} and pairwise distinct neighborhoods, so the
    left-to-edge map is a bijection.
    """
    seen: dict[tuple[int, ...], int] = {}
    for l in range(graph.left_count):
        nbrs = graph.adj[l]
        if len(nbrs) not in (2, 3):
            raise ValidationError(
                "left vertex %d has degree %d, need 2 or 3" % (l, len(nbrs)))
        if nbrs in seen:
            raise ValidationError(
                "left vertices %d and %d have the same neighborhood %r"
                % (seen[nbrs], l, nbrs))
        seen[nbrs] = l

    used = sorted({r for l in range(graph.left_count) for r in graph.adj[l]})
    vertex_of_right: list[Optional[int]] = [None] * graph.right_count
    for i, r in enumerate(used):
        vertex_of_right[r] = i
    edges = tuple(tuple(vertex_of_right[r] for r in graph.adj[l])
                  for l in range(graph.left_count))
    h = Hypergraph(vertex_count=len(used), edges=edges)  # type: ignore[arg-type]
    return HypergraphView(
        hypergraph=h,
        edge_of_left=tuple(range(graph.left_count)),
        vertex_of_right=tuple(vertex_of_right),
        right_of_vertex=tuple(used),
    )


def incidence_graph(h: Hypergraph) -> BipartiteGraph:
    """Bipartite incidence form: left = edges, right = vertices."""
    pairs = [(i, v) for i, e in enumerate(h.edges) for v in e]
    return build_graph(pairs, len(h.edges), h.vertex_count)


@dataclass(frozen=True)
class HypothesesReport:
    ok: bool
    items: tuple[tuple[str, bool, str], ...]


def check_hall_hypotheses(graph: BipartiteGraph, epsilon) -> HypothesesReport:
    """The structural hypotheses of the covering criterion, itemized.

    Checks: every left degree at most 3; no two degree-3 left vertices
    with equal neighborhoods; and |N(L)| >= (2 - eps)|L|.
    """
    eps = as_fraction(epsilon)
    items: list[tuple[str, bool, str]] = []

    offenders = [l for l in range(graph.left_count) if graph.left_degree(l) > 3]
    items.append(("left degree at most 3", not offenders,
                  "offenders %s" % offenders if offenders else "all degrees <= 3"))

    dup = None
    seen: dict[tuple[int, ...], int] = {}
    for l in range(graph.left_count):
        if graph.left_degree(l) != 3:
            continue
        if graph.adj[l] in seen and dup is None:
            dup = (seen[graph.adj[l]], l)
        seen.setdefault(graph.adj[l], l)
    items.append(("distinct degree-3 neighborhoods", dup is None,
                  "duplicate pair L%d, L%d" % dup if dup else "all distinct"))

    nl = len(graph.neighborhood(range(graph.left_count)))
    need = (Fraction(2) - eps) * graph.left_count
    items.append(("|N(L)| >= (2-eps)|L|", Fraction(nl) >= need,
                  "|N(L)|=%d, bound=%s" % (nl, need)))

    return HypothesesReport(ok=all(ok for _, ok, _ in items), items=tuple(items))


# ---------------------------------------------------------------------------
# reducible configurations


@dataclass(frozen=True)
class ReduciblePattern:
    """A small edge configuration given by symbolic edges.

    ``edges`` lists the member edges as tuples of symbols; ``degrees``
    pins the exact hypergraph degree of some symbols.  Symbols without a
    degree constraint are wildcards and may collide with each other.
    """

    name: str
    edges: tuple[tuple[str, ...], ...]
    degrees: tuple[tuple[str, int], ...]

    def degree_map(self) -> dict[str, int]:
        return dict(self.degrees)


DEFAULT_PATTERNS: tuple[ReduciblePattern, ...] = (
    # a size-2 edge on two degree-1 vertices
    ReduciblePattern("a", (("d1", "d2"),), (("d1", 1), ("d2", 1))),
    # a size-3 edge containing two degree-1 vertices
    ReduciblePattern("b", (("d1", "d2", "w"),), (("d1", 1), ("d2", 1))),
    # a degree-2 vertex whose two edges are size-2 with degree-1 ends
    ReduciblePattern("c", (("x", "d1"), ("x", "d2")),
                     (("x", 2), ("d1", 1), ("d2", 1))),
    # same with one size-2 and one size-3 edge
    ReduciblePattern("d", (("x", "d1"), ("x", "d2", "z")),
                     (("x", 2), ("d1", 1), ("d2", 1))),
    # same with two size-3 edges
    ReduciblePattern("e", (("x", "d1", "z1"), ("x", "d2", "z2")),
                     (("x", 2), ("d1", 1), ("d2", 1))),
)


def patterns_to_json(patterns: Iterable[ReduciblePattern]) -> str:
    payload = [
        {"name": p.name, "edges": [list(e) for e in p.edges],
         "degrees": {s: d for s, d in p.degrees}}
        for p in patterns
    ]
    return json.dumps(payload, indent=2) + "\n"


def patterns_from_json(text: str) -> tuple[ReduciblePattern, ...]:
    try:
        payload = json.loads(text)
        out = []
        for item in payload:
            out.append(ReduciblePattern(
                name=str(item["name"]),
                edges=tuple(tuple(str(s) for s in e) for e in item["edges"]),
                degrees=tuple((str(s), int(d))
                              for s, d in item["degrees"].items()),
            ))
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise FormatError("bad pattern file: %s" % exc) from exc
    return tuple(out)


@dataclass(frozen=True)
class PatternMatch:
    pattern: str
    edge_indices: tuple[int, ...]
    binding: tuple[tuple[str, int], ...]


def _match_pattern(h: Hypergraph, pattern: ReduciblePattern,
                   degrees: tuple[int, ...]) -> list[PatternMatch]:
    degmap = pattern.degree_map()
    k = len(pattern.edges)
    found: dict[frozenset[int], PatternMatch] = {}
    for indices in itertools.permutations(range(len(h.edges)), k):
        if len({*indices}) != k:
            continue
        if any(len(h.edges[i]) != len(pattern.edges[t]) for t, i in enumerate(indices)):
            continue
        key = frozenset(indices)
        if key in found:
            continue

        def assign(t: int, binding: dict[str, int]) -> Optional[dict[str, int]]:
            if t == k:
                return binding
            symbols = pattern.edges[t]
            verts = h.edges[indices[t]]
            for perm in itertools.permutations(verts):
                ok = True
                trial = dict(binding)
                for s, v in zip(symbols, perm):
                    if s in trial:
                        if trial[s] != v:
                            ok = False
                            break
                    else:
                        if s in degmap and degrees[v] != degmap[s]:
                            ok = False
                            break
                        if s in degmap and v in {trial[u] for u in trial if u in degmap}:
                            ok = False
                            break
                        trial[s] = v
                if not ok:
                    continue
                if len({trial[s] for s in symbols}) != len(symbols):
                    continue
                res = assign(t + 1, trial)
                if res is not None:
                    return res
            return None

        binding = assign(0, {})
        if binding is not None:
            found[key] = PatternMatch(
                pattern=pattern.name,
                edge_indices=tuple(sorted(indices)),
                binding=tuple(sorted(binding.items())),
            )
    return [found[k] for k in sorted(found, key=sorted)]


def _match_has_local_cover(h: Hypergraph, match: PatternMatch) -> bool:
    """The match's edges must be coverable by pairs of vertices whose
    every incident edge lies inside the configuration; such a local cover
    can never interact with a cover of the remaining edges."""
    config = set(match.edge_indices)
    internal = [v for v in range(h.vertex_count)
                if any(v in h.edges[i] for i in config)
                and all(i in config for i in h.edges_at(v))]
    external = set(range(h.vertex_count)) - set(internal)
    return find_2path_cover(h, config, banned_vertices=external) is not None


def detect_reducible(h: Hypergraph,
                     patterns: Iterable[ReduciblePattern] = DEFAULT_PATTERNS
                     ) -> list[PatternMatch]:
    """All occurrences of the reducible patterns, one per edge set.

    Every reported occurrence is re-checked to admit a local 2-path cover
    on configuration-internal vertices; a pattern that matches without
    that property is a broken pattern definition, not a negative verdict.
    """
    degrees = h.degrees()
    out: list[PatternMatch] = []
    for pattern in patterns:
        for match in _match_pattern(h, pattern, degrees):
            if not _match_has_local_cover(h, match):
                raise InconsistencyError(
                    "pattern %r matched edges %s without a local cover"
                    % (pattern.name, match.edge_indices))
            out.append(match)
    return out


# ---------------------------------------------------------------------------
# discharging audit


@dataclass(frozen=True)
class ChargeLine:
    name: str
    lhs: Fraction
    relation: str
    rhs: Fraction
    holds: bool


def _line(name: str, lhs, relation: str, rhs) -> ChargeLine:
    lhs, rhs = Fraction(lhs), Fraction(rhs)
    if relation == "<=":
        holds = lhs <= rhs
    elif relation == ">=":
        holds = lhs >= rhs
    elif relation == "==":
        holds = lhs == rhs
    else:
        raise ValidationError("unknown relation %r" % relation)
    return ChargeLine(name=name, lhs=lhs, relation=relation, rhs=rhs, holds=holds)


@dataclass(frozen=True)
class ChargeReport:
    epsilon: Fraction
    average_degree: Fraction
    degree1_vertices: tuple[int, ...]
    degree1_edges: tuple[int, ...]
    size2_edges: tuple[int, ...]
    degree1_size2_edges: tuple[int, ...]
    zero_charge_vertices: tuple[int, ...]
    total_charge: int
    isolated_vertices: tuple[int, ...]
    matches: tuple[PatternMatch, ...]
    lines: tuple[ChargeLine, ...]
    config_free: bool
    expansion_holds: bool
    fully_consistent: bool

    def line(self, name: str) -> ChargeLine:
        for ln in self.lines:
            if ln.name == name:
                return ln
        raise KeyError(name)


def discharge_audit(h: Hypergraph, epsilon) -> ChargeReport:
    """Evaluate every quantity and inequality of the counting argument.

    Charging scheme: each vertex starts with its degree; each edge that
    contains a degree-1 vertex starts with -|edge| and then passes -1 to
    each of its vertices, ending at zero.  A vertex ends at zero exactly
    when all of its edges carry a degree-1 vertex.  The report records
    the whole inequality chain; ``fully_consistent`` means every link and
    the terminal test hold on a configuration-free, isolated-free input
    with the vertex/edge expansion - which the argument proves impossible
    for eps below 1/23.
    """
    eps = as_fraction(epsilon)
    if not (Fraction(0) < eps < Fraction(1, 2)):
        raise ValidationError("epsilon must be in (0, 1/2)")
    nv, ne = h.vertex_count, len(h.edges)
    if nv == 0:
        raise ValidationError("empty hypergraph")
    degrees = h.degrees()
    isolated = h.isolated_vertices()

    d_vertices = tuple(v for v in range(nv) if degrees[v] == 1)
    d_edges = tuple(i for i, e in enumerate(h.edges)
                    if any(degrees[v] == 1 for v in e))
    e2 = h.size2_edges()
    d2 = tuple(i for i in d_edges if len(h.edges[i]) == 2)

    deg_sum = sum(degrees)
    avg = Fraction(deg_sum, nv)
    charge = [degrees[v] - sum(1 for i in d_edges if v in h.edges[i])
              for v in range(nv)]
    assert all(c >= 0 for c in charge)
    total = sum(charge)
    zero = tuple(v for v in range(nv) if charge[v] == 0)
    z_minus_d = [v for v in zero if v not in d_vertices]

    matches = tuple(detect_reducible(h))
    config_free = not matches
    two_eps = Fraction(2) - eps

    nD, nDD, nE2, nD2, nZ = (len(d_vertices), len(d_edges), len(e2),
                             len(d2), len(zero))
    lines = (
        _line("expansion |V| >= (2-eps)|E|", nv, ">=", two_eps * ne),
        _line("degree sum <= 3|E|", deg_sum, "<=", 3 * ne),
        _line("d <= 3/(2-eps)", avg, "<=", Fraction(3) / two_eps),
        _line("|D| == |DD|", nD, "==", nDD),
        _line("|D| <= |V|/(2-eps)", nD, "<=", Fraction(nv) / two_eps),
        _line("|D| >= (1-2eps)/(2-eps)|V|", nD, ">=",
              (1 - 2 * eps) / two_eps * nv),
        _line("C == 3|E|-|E2|-3|DD|+|DD2|", total, "==",
              3 * ne - nE2 - 3 * nDD + nD2),
        _line("C <= 6eps/(2-eps)|V|", total, "<=", 6 * eps / two_eps * nv),
        _line("|Z| >= (2-7eps)/(2-eps)|V|", nZ, ">=",
              (2 - 7 * eps) / two_eps * nv),
        _line("|Z\\D| >= (1-7eps)/(2-eps)|V|", len(z_minus_d), ">=",
              (1 - 7 * eps) / two_eps * nv),
        _line("min degree over Z\\D >= 3",
              min((degrees[v] for v in z_minus_d), default=3), ">=", 3),
        _line("|D|+3|Z\\D| <= degree sum", nD + 3 * len(z_minus_d), "<=",
              deg_sum),
        _line("terminal 3 >= 4-23eps", 3, ">=", 4 - 23 * eps),
    )

    expansion = lines[0].holds
    fully = (config_free and not isolated and expansion
             and all(ln.holds for ln in lines))
    return ChargeReport(
        epsilon=eps,
        average_degree=avg,
        degree1_vertices=d_vertices,
        degree1_edges=d_edges,
        size2_edges=e2,
        degree1_size2_edges=d2,
        zero_charge_vertices=zero,
        total_charge=total,
        isolated_vertices=isolated,
        matches=matches,
        lines=lines,
        config_free=config_free,
        expansion_holds=expansion,
        fully_consistent=fully,
    )


# ---------------------------------------------------------------------------
# base hypergraph and gadget searches


def _cache_path(name: str) -> Optional[Path]:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    return Path(root) / name


def _cache_read(name: str) -> Optional[tuple[Hypergraph, Optional[int]]]:
    path = _cache_path(name)
    if path is None or not path.is_file():
        return None
    try:
        return parse_hgraph(path.read_text())
    except (OSError, FormatError):
        return None


def _cache_write(name: str, h: Hypergraph, special: Optional[int] = None) -> None:
    path = _cache_path(name)
    if path is None:
        return
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(write_hgraph(h, special))
        tmp.replace(path)
    except OSError:
        pass


def _all_edges(vertex_count: int) -> list[tuple[int, ...]]:
    verts = range(vertex_count)
    out = [tuple(p) for p in itertools.combinations(verts, 2)]
    out += [tuple(t) for t in itertools.combinations(verts, 3)]
    return sorted(out)


def _is_critical(h: Hypergraph) -> bool:
    """No full cover, but dropping any single edge leaves a cover.

    Coverability is monotone under edge subsets, so checking the maximal
    proper subsets settles all of them.
    """
    if find_2path_cover(h) is not None:
        return False
    all_idx = set(range(len(h.edges)))
    return all(find_2path_cover(h, all_idx - {i}) is not None for i in all_idx)


_BASE_MEMO: list[Hypergraph] = []


def find_base_hypergraph() -> Hypergraph:
    """Lexicographically first 6-vertex, 4-edge hypergraph that has no
    2-path cover while every proper edge subset has one."""
    if _BASE_MEMO:
        return _BASE_MEMO[0]
    cached = _cache_read("base.hgraph")
    if cached is not None and cached[0].vertex_count == 6 and len(cached[0].edges) == 4:
        _BASE_MEMO.append(cached[0])
        return cached[0]
    for combo in itertools.combinations(_all_edges(6), 4):
        if len({v for e in combo for v in e}) != 6:
            continue
        h = Hypergraph(vertex_count=6, edges=combo)
        if _is_critical(h):
            _BASE_MEMO.append(h)
            _cache_write("base.hgraph", h)
            return h
    raise InconsistencyError("no 6-vertex 4-edge critical hypergraph found")


def _pendant_edges(h: Hypergraph) -> list[tuple[int, int, int]]:
    """Size-2 edges with a degree-1 endpoint, as (edge index, keep, drop).

    ``keep`` is the attachment vertex, ``drop`` the degree-1 endpoint; if
    both endpoints have degree 1, the smaller one is kept.
    """
    deg = h.degrees()
    out = []
    for i, e in enumerate(h.edges):
        if len(e) != 2:
            continue
        a, b = e
        if deg[b] == 1:
            out.append((i, a, b))
        elif deg[a] == 1:
            out.append((i, b, a))
    return out


def _glue(host: Hypergraph, pendant: tuple[int, int, int],
          gadget: Hypergraph, x: int) -> Hypergraph:
    """Remove the host's pendant edge and its degree-1 endpoint, then
    attach the gadget by identifying its distinguished vertex with the
    kept endpoint.  Host vertices keep their relative order, gadget
    vertices are appended in order."""
    idx, keep, drop = pendant
    host_map: dict[int, int] = {}
    next_id = 0
    for v in range(host.vertex_count):
        if v == drop:
            continue
        host_map[v] = next_id
        next_id += 1
    gadget_map: dict[int, int] = {x: host_map[keep]}
    for v in range(gadget.vertex_count):
        if v == x:
            continue
        gadget_map[v] = next_id
        next_id += 1
    edges = [tuple(sorted(host_map[v] for v in e))
             for i, e in enumerate(host.edges) if i != idx]
    edges += [tuple(sorted(gadget_map[v] for v in e)) for e in gadget.edges]
    return Hypergraph(vertex_count=next_id, edges=tuple(edges))


def amplify(base: Hypergraph, gadget: Hypergraph, x: int, n: int) -> Hypergraph:
    """Apply the ratio-raising step n times.

    Each step removes a size-2 pendant edge, deletes its degree-1 end,
    and glues the gadget at the other end.  The pendant chosen is the
    first (by edge order) whose removal leaves every cover of the rest
    pinning the attachment vertex; that is the property the gluing
    argument consumes.  Adds 10 vertices and 6 edges per step.
    """
    if n < 0:
        raise ValidationError("n must be non-negative")
    current = base
    for step in range(n):
        chosen = None
        for pend in _pendant_edges(current):
            idx, keep, _ = pend
            rest = [i for i in range(len(current.edges)) if i != idx]
            if covers_strongly(current, keep, rest):
                chosen = pend
                break
        if chosen is None:
            raise ValidationError(
                "no size-2 pendant edge with a pinned attachment vertex "
                "at step %d" % step)
        before = (current.vertex_count, len(current.edges))
        current = _glue(current, chosen, gadget, x)
        assert current.vertex_count == before[0] + gadget.vertex_count - 2
        assert len(current.edges) == before[1] + len(gadget.edges) - 1
    return current


def _mini_gadget_ok(h: Hypergraph, x: int) -> bool:
    """Interface of the small forcing unit the gadget search composes:
    coverable, no cover avoids x, every maximal proper subset has a cover
    avoiding x, and a size-2 pendant edge away from x remains."""
    # x inside a size-2 edge makes every subset containing that edge
    # uncoverable without x, which kills the proper-subset condition; a
    # vertex of degree 0 cannot be forced at all.
    if h.degree(x) == 0 or any(x in h.edges[i] for i in h.size2_edges()):
        return False
    if find_2path_cover(h, banned_vertices=(x,)) is not None:
        return False
    if find_2path_cover(h) is None:
        return False
    all_idx = set(range(len(h.edges)))
    for i in all_idx:
        if find_2path_cover(h, all_idx - {i}, banned_vertices=(x,)) is None:
            return False
    return any(x not in h.edges[i] for i, _, _ in _pendant_edges(h))


def _gadget_posts(base: Hypergraph, candidate: Hypergraph, x: int) -> bool:
    """Full contract of the gadget: the avoidance properties plus honest
    verification of one and two amplification steps."""
    all_idx = set(range(len(candidate.edges)))
    if find_2path_cover(candidate) is None:
        return False
    if find_2path_cover(candidate, banned_vertices=(x,)) is not None:
        return False
    for i in all_idx:
        if find_2path_cover(candidate, all_idx - {i}, banned_vertices=(x,)) is None:
            return False
    try:
        for n in (1, 2):
            amped = amplify(base, candidate, x, n)
            if amped.vertex_count != 6 + 10 * n or len(amped.edges) != 4 + 6 * n:
                return False
            if not _is_critical(amped):
                return False
    except ValidationError:
        return False
    return True


_GADGET_MEMO: list[tuple[Hypergraph, int]] = []


def find_gadget() -> tuple[Hypergraph, int]:
    """Search for the 12-vertex, 7-edge amplification gadget.

    The spine is a 7-vertex, 4-edge unit that every cover must route
    through a distinguished vertex while all proper subsets can avoid it.
    Gluing that unit onto the base yields an 11-vertex critical
    hypergraph; re-attaching a fresh distinguished vertex to one of its
    size-2 edges gives the candidate, which is then checked against the
    full contract including two verified amplification rounds.
    """
    if _GADGET_MEMO:
        return _GADGET_MEMO[0]
    cached = _cache_read("gadget.hgraph")
    if cached is not None and cached[1] is not None \
            and cached[0].vertex_count == 12 and len(cached[0].edges) == 7:
        _GADGET_MEMO.append((cached[0], cached[1]))
        return _GADGET_MEMO[0]

    base = find_base_hypergraph()
    base_pendants = [p for p in _pendant_edges(base)
                     if covers_strongly(base, p[1],
                                        [i for i in range(len(base.edges))
                                         if i != p[0]])]
    for combo in itertools.combinations(_all_edges(7), 4):
        if len({v for e in combo for v in e}) != 7:
            continue
        mini = Hypergraph(vertex_count=7, edges=combo)
        if find_2path_cover(mini) is None:
            continue
        for xhat in range(7):
            if not _mini_gadget_ok(mini, xhat):
                continue
            for pend in base_pendants:
                core = _glue(base, pend, mini, xhat)
                if core.vertex_count != 11 or not _is_critical(core):
                    continue
                for i, e in enumerate(core.edges):
                    if len(e) != 2:
                        continue
                    cand = Hypergraph(
                        vertex_count=12,
                        edges=tuple(tuple(sorted(e + (11,))) if j == i
                                    else core.edges[j]
                                    for j in range(len(core.edges))))
                    if _gadget_posts(base, cand, 11):
                        _GADGET_MEMO.append((cand, 11))
                        _cache_write("gadget.hgraph", cand, 11)
                        return _GADGET_MEMO[0]
    raise InconsistencyError("gadget search exhausted without a hit")


# ---------------------------------------------------------------------------
# counterexample construction and the verification harness


@dataclass(frozen=True)
class Counterexample:
    epsilon: Fraction
    n: int
    hypergraph: Hypergraph
    incidence: BipartiteGraph
    hypotheses: HypothesesReport
    full_uncoverable: bool
    proper_subsets_coverable: bool

    @property
    def ok(self) -> bool:
        return (self.hypotheses.ok and self.full_uncoverable
                and self.proper_subsets_coverable)


def hall_counterexample(epsilon, verify: bool = True) -> Counterexample:
    """Smallest amplified instance whose vertex/edge ratio reaches
    (2 - eps): hypotheses hold, proper subsets are coverable, yet the
    full edge set is not.  Only meaningful for eps > 1/3."""
    eps = as_fraction(epsilon)
    if not (Fraction(1, 3) < eps <= Fraction(1, 2)):
        raise ValidationError("epsilon must be in (1/3, 1/2]")
    # smallest n with (6+10n)/(4+6n) >= 2-eps
    num = 2 - 4 * eps
    den = 6 * eps - 2
    n = max(0, -(-num.numerator * den.denominator
                 // (num.denominator * den.numerator)))
    base = find_base_hypergraph()
    gadget, x = find_gadget()
    h = amplify(base, gadget, x, n)
    assert Fraction(h.vertex_count, len(h.edges)) >= 2 - eps
    inc = incidence_graph(h)
    hyps = check_hall_hypotheses(inc, eps)
    if verify:
        full_bad = find_2path_cover(h) is None
        all_idx = set(range(len(h.edges)))
        subsets_ok = all(find_2path_cover(h, all_idx - {i}) is not None
                         for i in all_idx)
    else:
        full_bad = True
        subsets_ok = True
    return Counterexample(
        epsilon=eps, n=n, hypergraph=h, incidence=inc, hypotheses=hyps,
        full_uncoverable=full_bad, proper_subsets_coverable=subsets_ok,
    )


@dataclass(frozen=True)
class HarnessReport:
    checked: int
    eligible: int
    counterexamples: tuple[Hypergraph, ...]


def hall_verify(epsilon, max_left: int, samples: int, seed: int) -> HarnessReport:
    """Randomized search for counterexamples to the covering criterion.

    Draws hypergraphs with up to ``max_left`` edges; the eligible ones
    are those whose incidence graph passes the hypotheses and whose
    maximal proper edge subsets are all coverable.  For eligible inputs
    the full edge set must be coverable too; any exception is returned.
    """
    import random as _random

    eps = as_fraction(epsilon)
    rng = _random.Random(seed)
    checked = eligible = 0
    bad: list[Hypergraph] = []
    for _ in range(samples):
        ne = rng.randint(1, max_left)
        lo = -(-((2 - eps) * ne).numerator // ((2 - eps) * ne).denominator)
        nv = rng.randint(max(2, lo), 3 * ne)
        edges = []
        seen = set()
        ok = True
        for _e in range(ne):
            size = rng.choice((2, 3))
            if nv < size:
                ok = False
                break
            e = tuple(sorted(rng.sample(range(nv), size)))
            if e in seen:
                ok = False
                break
            seen.add(e)
            edges.append(e)
        if not ok:
            continue
        used = sorted({v for e in edges for v in e})
        relabel = {v: i for i, v in enumerate(used)}
        h = Hypergraph(vertex_count=len(used),
                       edges=tuple(tuple(sorted(relabel[v] for v in e))
                                   for e in edges))
        checked += 1
        if not check_hall_hypotheses(incidence_graph(h), eps).ok:
            continue
        all_idx = set(range(len(h.edges)))
        if any(find_2path_cover(h, all_idx - {i}) is None for i in all_idx):
            continue
        eligible += 1
        if find_2path_cover(h) is None:
            bad.append(h)
    return HarnessReport(checked=checked, eligible=eligible,
                         counterexamples=tuple(bad))
