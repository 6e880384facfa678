"""Command-line front end tying the library into reproducible pipelines.

Every subcommand is a thin wrapper around one library entry point: the
verdict printed here always equals the verdict of the corresponding
call.  Reports start with a provenance header (tool version, seed, and
a hash of the semantic configuration) so identical invocations produce
byte-identical output.

Exit codes: 0 success, 1 clean negative verdict (no cover, hypotheses
rejected, trace invalid...), 2 usage or parse problem, 3 enumeration cap
refusal, 4 internal inconsistency.

Rationals on the command line are exact "p/q" strings; floats are
rejected.  The VWSPACE_CACHE_DIR environment variable points the
hypergraph searches at a persistent cache directory.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from .cnfspace import (
    Cnf,
    check_concentration,
    degree_stats,
    adjacency_graph,
    gen_random_cnf,
    parse_dimacs,
    parse_pcr_trace,
    parse_res_trace,
    tr_encode,
    verify_pcr_trace,
    verify_res_trace,
    write_dimacs,
)
from .covergame import (
    GameState,
    GameTranscript,
    check_game_hypotheses,
    init_cover,
    play,
    remove_component,
    respond,
    theorem_mu,
    write_transcript,
)
from .errors import (
    FormatError,
    GameRuleError,
    HypothesisError,
    InconsistencyError,
    ResourceCapError,
    ValidationError,
)
from .graph import (
    DEFAULT_COVER_CAP,
    DEFAULT_EXPANDER_CAP,
    BipartiteGraph,
    VwMatching,
    find_vw_cover,
    is_expander,
    parse_bigraph,
    write_bigraph,
)
from .hall import (
    amplify,
    find_base_hypergraph,
    find_gadget,
    hall_counterexample,
    hall_verify,
    write_hgraph,
)
from .strategy import (
    DEFAULT_MEMBER_CAP,
    check_k_winning,
    extract_strategy,
    verify_kwin_certificate,
    write_kwin_certificate,
)

__all__ = ["build_parser", "main"]

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_CAP = 3
EXIT_INTERNAL = 4


# ---------------------------------------------------------------------------
# argument and report plumbing


_RATIONAL_RE = re.compile(r"[+-]?\d+(/\d+)?\Z")


def rational(text: str) -> Fraction:
    """Exact "p/q" (or integer) argument; floats are a usage error."""
    if not _RATIONAL_RE.match(text.strip()):
        raise argparse.ArgumentTypeError(
            "expected an exact rational like 6 or 1/24, got %r" % text)
    try:
        return Fraction(text.strip())
    except ZeroDivisionError:
        raise argparse.ArgumentTypeError("zero denominator in %r" % text)


def vertex_list(text: str) -> tuple[int, ...]:
    """Comma-separated vertex indices; empty string means none."""
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers, "
                                         "got %r" % text)


def config_hash(config: dict) -> str:
    """Short stable digest of the semantic configuration of a run."""
    blob = json.dumps({k: str(v) for k, v in config.items()}, sort_keys=True)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def provenance(seed: int, config: dict) -> list[str]:
    return ["vwspace %s" % __version__,
            "seed %d" % seed,
            "config %s" % config_hash(config)]


def print_header(args, **config) -> None:
    """Provenance lines on stdout, comment-prefixed per output format."""
    prefix = "# " if args.format == "csv" else "c "
    for line in provenance(args.seed, config):
        print(prefix + line)


def format_table(header: tuple[str, ...], rows: list[tuple], fmt: str) -> str:
    """Aligned text columns, or CSV with a stable header row."""
    cells = [tuple(str(x) for x in row) for row in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(cells)
        return buf.getvalue()
    widths = [len(h) for h in header]
    for row in cells:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    lines = [" ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    for row in cells:
        lines.append(" ".join(c.ljust(w)
                              for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def write_output(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def read_cnf(path: str) -> Cnf:
    return parse_dimacs(read_text(path))


def read_graph(path: str) -> BipartiteGraph:
    return parse_bigraph(read_text(path))


def print_matching(matching: VwMatching) -> None:
    print("F %d" % matching.component_count())
    for comp in matching.components:
        print("f " + " ".join(str(x) for x in comp))


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    phi = gen_random_cnf(args.n, args.delta, args.seed)
    head = provenance(args.seed, {"command": "gen", "n": args.n,
                                  "delta": args.delta})
    write_output(args.output, write_dimacs(phi, comments=head))
    return EXIT_OK


def cmd_graph(args) -> int:
    phi = read_cnf(args.cnf)
    graph = adjacency_graph(phi)
    head = provenance(args.seed, {"command": "graph", "cnf": args.cnf})
    write_output(args.output, write_bigraph(graph, comments=head))
    if args.output is not None:
        print_header(args, command="graph", cnf=args.cnf)
        degrees = [len(graph.radj[r]) for r in range(graph.right_count)]
        print("left: %d  right: %d  edges: %d  max right degree: %d"
              % (graph.left_count, graph.right_count, len(graph.edges()),
                 max(degrees, default=0)))
    return EXIT_OK


def cmd_expander(args) -> int:
    graph = read_graph(args.graph)
    cap = args.caps or DEFAULT_EXPANDER_CAP
    ok, witness = is_expander(graph, args.s, args.delta, cap=cap)
    print_header(args, command="expander", graph=args.graph, s=args.s,
                 delta=args.delta)
    print("expander: %s" % ("yes" if ok else "no"))
    if witness is not None:
        neigh: set[int] = set()
        for v in witness:
            neigh.update(graph.adj[v])
        print("witness: %s" % " ".join("L%d" % v for v in witness))
        print("neighborhood: %d vertices for %d lefts"
              % (len(neigh), len(witness)))
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_vwcover(args) -> int:
    graph = read_graph(args.graph)
    if args.targets is None:
        targets: tuple[int, ...] = tuple(range(graph.left_count))
    else:
        targets = args.targets
    cap = args.caps or DEFAULT_COVER_CAP
    cover = find_vw_cover(graph, targets, banned_left=args.ban_left,
                          banned_right=args.ban_right, cap=cap)
    print_header(args, command="vwcover", graph=args.graph, targets=targets,
                 ban_left=args.ban_left, ban_right=args.ban_right)
    if cover is None:
        print("cover: none")
        return EXIT_NEGATIVE
    print("cover: %d components" % cover.component_count())
    for comp in cover.components:
        print("f " + " ".join(str(x) for x in comp))
    return EXIT_OK


def cmd_hall(args) -> int:
    if args.mode == "verify":
        report = hall_verify(args.epsilon, args.max_left, args.samples,
                             args.seed)
        print_header(args, command="hall verify", epsilon=args.epsilon,
                     max_left=args.max_left, samples=args.samples)
        print("%d counterexamples, %d graphs checked (%d eligible)"
              % (len(report.counterexamples), report.checked,
                 report.eligible))
        for h in report.counterexamples:
            sys.stdout.write(write_hgraph(h))
        return EXIT_OK if not report.counterexamples else EXIT_NEGATIVE

    if args.mode == "counterexample":
        cx = hall_counterexample(args.epsilon, verify=not args.skip_verify)
        head = provenance(args.seed, {"command": "hall counterexample",
                                      "epsilon": args.epsilon})
        print_header(args, command="hall counterexample",
                     epsilon=args.epsilon)
        h = cx.hypergraph
        print("epsilon: %s" % cx.epsilon)
        print("amplification steps: %d" % cx.n)
        print("vertices: %d" % h.vertex_count)
        print("edges: %d" % len(h.edges))
        print("hypotheses: %s" % ("ok" if cx.hypotheses.ok else "rejected"))
        if not args.skip_verify:
            print("full edge set coverable: %s"
                  % ("no" if cx.full_uncoverable else "yes"))
            print("proper subsets coverable: %s"
                  % ("yes" if cx.proper_subsets_coverable else "no"))
            if not cx.ok:
                raise InconsistencyError(
                    "constructed instance failed its own verification")
        if args.output is not None:
            write_output(args.output, write_hgraph(h, comments=head))
        else:
            sys.stdout.write(write_hgraph(h))
        return EXIT_OK

    assert args.mode == "gadget"
    base = find_base_hypergraph()
    gadget, x = find_gadget()
    h = amplify(base, gadget, x, args.n)
    head = provenance(args.seed, {"command": "hall gadget", "n": args.n})
    print_header(args, command="hall gadget", n=args.n)
    print("vertices: %d" % h.vertex_count)
    print("edges: %d" % len(h.edges))
    if args.output is not None:
        write_output(args.output, write_hgraph(h, comments=head))
    else:
        sys.stdout.write(write_hgraph(h))
    return EXIT_OK


def _repl_move(line: str):
    parts = line.split()
    if not parts:
        return None
    if parts[0] in ("quit", "q", "exit"):
        return ("quit",)
    try:
        if parts[0] == "challenge" and len(parts) == 3 \
                and parts[1] in ("L", "R"):
            return ("challenge", parts[1], int(parts[2]))
        if parts[0] == "remove" and len(parts) == 2:
            return ("remove", int(parts[1]))
    except ValueError:
        pass
    raise ValidationError("unknown move %r "
                          "(try: challenge L 0 | challenge R 1 | remove 0 "
                          "| quit)" % line.strip())


def _play_interactive(args, graph: BipartiteGraph, head: list[str]) -> int:
    strict = args.mu is None
    cap = args.caps or DEFAULT_EXPANDER_CAP
    strategy = init_cover(graph, args.epsilon, args.threshold, args.s,
                          strict=strict, expander_cap=cap,
                          assume_expander=args.assume_expander)
    if args.mu is None:
        mu, mu_source = theorem_mu(args.epsilon, args.s,
                                   args.threshold), "formula"
    else:
        if args.mu < 0:
            raise ValidationError("mu must be non-negative")
        mu, mu_source = args.mu, "override"
    state = GameState(strategy=strategy, mu=mu, mu_source=mu_source,
                      matching=VwMatching.of(()))
    print("mu: %d (%s)" % (mu, mu_source))
    print_matching(state.matching)

    survived, reason = True, None
    for raw in sys.stdin:
        try:
            move = _repl_move(raw)
        except ValidationError as exc:
            print("error: %s" % exc)
            continue
        if move is None:
            continue
        if move[0] == "quit":
            break
        try:
            if move[0] == "challenge":
                respond(state, (move[1], move[2]))
            else:
                remove_component(state, move[1])
        except (ValidationError, GameRuleError) as exc:
            print("error: %s" % exc)
            continue
        except InconsistencyError as exc:
            if strategy.hypotheses.ok:
                raise
            survived, reason = False, "losing move %r: %s" % (move, exc)
            print("cover loses: %s" % exc)
            break
        print_matching(state.matching)

    if args.transcript is not None:
        transcript = GameTranscript(
            mu=mu, mu_source=mu_source, records=tuple(state.records),
            survived=survived, loss_reason=reason,
            games_explored=len(state.records),
            pre_cover=strategy.matching.components,
            epsilon=strategy.epsilon, s=strategy.s,
            hypotheses_ok=strategy.hypotheses.ok)
        write_output(args.transcript,
                     "".join("c %s\n" % line for line in head)
                     + write_transcript(transcript))
    print("survived: %s" % ("yes" if survived else "no"))
    return EXIT_OK if survived else EXIT_NEGATIVE


def cmd_covergame(args) -> int:
    graph = read_graph(args.graph)
    config = {"command": "covergame play", "graph": args.graph,
              "epsilon": args.epsilon, "threshold": args.threshold,
              "s": args.s, "mu": args.mu, "moves": args.moves,
              "adversary": "interactive" if args.interactive
              else args.adversary}
    head = provenance(args.seed, config)
    print_header(args, **config)
    try:
        if args.interactive:
            return _play_interactive(args, graph, head)
        transcript = play(graph, args.epsilon, args.threshold, args.s,
                          adversary=args.adversary, max_moves=args.moves,
                          seed=args.seed, mu=args.mu,
                          expander_cap=args.caps or DEFAULT_EXPANDER_CAP,
                          assume_expander=args.assume_expander)
    except InconsistencyError as exc:
        # the pre-cover is only guaranteed when the hypotheses hold; a
        # setup failure on a graph that fails them is a clean loss, not
        # a library bug
        hyps = check_game_hypotheses(
            graph, args.epsilon, args.threshold, args.s,
            expander_cap=args.caps or DEFAULT_EXPANDER_CAP,
            assume_expander=args.assume_expander)
        if hyps.ok:
            raise
        print("cover loses during setup: %s" % exc)
        for name, holds, _ in hyps.items:
            if not holds:
                print("  - %s" % name)
        return EXIT_NEGATIVE
    print("mu: %d (%s)" % (transcript.mu, transcript.mu_source))
    print("pre-cover components: %d" % len(transcript.pre_cover))
    if args.adversary == "exhaustive":
        print("games explored: %d" % transcript.games_explored)
    else:
        print("moves: %d" % len(transcript.records))
    print("survived: %s" % ("yes" if transcript.survived else "no"))
    if transcript.loss_reason:
        print("loss: %s" % transcript.loss_reason)
    if args.transcript is not None:
        write_output(args.transcript,
                     "".join("c %s\n" % line for line in head)
                     + write_transcript(transcript))
    return EXIT_OK if transcript.survived else EXIT_NEGATIVE


def cmd_certify(args) -> int:
    phi = read_cnf(args.cnf)
    bound = args.caps or DEFAULT_MEMBER_CAP

    if args.check is not None:
        print_header(args, command="certify check", cnf=args.cnf,
                     certificate=args.check)
        report = verify_kwin_certificate(phi, read_text(args.check),
                                         bound=bound)
        if not report.ok:
            print("certificate: FAILED (%s)" % report.failure)
            return EXIT_NEGATIVE
        print("certificate: ok (k = %d, %d members, %d extensions)"
              % (report.k, report.members_checked,
                 report.extensions_checked))
        return EXIT_OK

    graph = adjacency_graph(phi)
    degrees = [len(graph.radj[r]) for r in range(graph.right_count)]
    threshold = args.threshold or max(max(degrees, default=0), 1)
    mu = args.mu or max(args.k, 1)
    config = {"command": "certify", "cnf": args.cnf, "k": args.k,
              "epsilon": args.epsilon, "s": args.s, "threshold": threshold,
              "mu": mu, "enforce": args.enforce}
    head = provenance(args.seed, config)
    print_header(args, **config)

    cover = init_cover(graph, args.epsilon, threshold, args.s,
                       strict=args.enforce,
                       expander_cap=args.caps or DEFAULT_EXPANDER_CAP,
                       enforce_property=args.enforce)
    strategy = extract_strategy(phi, cover, mu)
    report = check_k_winning(phi, strategy, args.k, enumeration_bound=bound)
    print("members: %d" % report.members_checked)
    print("extensions: %d" % report.extensions_checked)
    if not report.ok:
        print("k-winning: no (%s)" % report.failure)
        return EXIT_NEGATIVE
    print("k-winning: yes (k = %d)" % args.k)
    print("claimed: monomial space >= k/4 (k = %d: %s)"
          % (args.k, report.claimed_monomial_space))
    if report.claimed_total_space is not None:
        print("claimed: total space >= ((k-1)/2)^2 (k = %d: %s)"
              % (args.k, report.claimed_total_space))
    path = args.output if args.output is not None else args.cnf + ".kwin"
    write_output(path, "".join("c %s\n" % line for line in head)
                 + write_kwin_certificate(strategy, args.k, bound=bound))
    print("certificate: %s" % path)
    return EXIT_OK


def cmd_space(args) -> int:
    phi = read_cnf(args.cnf)
    text = read_text(args.trace)
    print_header(args, command="space", cnf=args.cnf, trace=args.trace,
                 system=args.system, field=args.field)
    if args.system == "res":
        report = verify_res_trace(phi, parse_res_trace(text))
        rows = [("steps", report.steps),
                ("refutation", "yes" if report.refutation else "no"),
                ("clause space", report.max_clause_count),
                ("total space", report.max_total_space),
                ("width", report.max_width)]
    else:
        field = None if args.field == "q" else int(args.field)
        axioms = tr_encode(phi, field)
        report = verify_pcr_trace(axioms, parse_pcr_trace(text, field))
        rows = [("steps", report.steps),
                ("refutation", "yes" if report.refutation else "no"),
                ("monomial space", report.max_monomial_space)]
    if not report.ok:
        print("invalid trace: step %s: %s"
              % (report.failed_step, report.reason))
        return EXIT_NEGATIVE
    sys.stdout.write(format_table(("measure", "value"), rows, args.format))
    return EXIT_OK


def cmd_stats(args) -> int:
    phi = read_cnf(args.cnf)
    print_header(args, command="stats", cnf=args.cnf, epsilon=args.epsilon,
                 c=args.c)
    stats = degree_stats(phi)
    rows = [(d, stats[d]) for d in sorted(stats)]
    sys.stdout.write(format_table(("d", "S_d"), rows, args.format))
    least = check_concentration(phi, args.epsilon, args.c)
    if least is None:
        print("concentration: none")
        return EXIT_NEGATIVE
    print("concentration: D = %d" % least)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="seed for every random draw (default 0)")
    common.add_argument("--caps", type=int, default=0, metavar="N",
                        help="override enumeration caps (0 = defaults)")
    common.add_argument("--format", choices=("text", "csv"), default="text",
                        help="report format (default text)")

    parser = argparse.ArgumentParser(
        prog="vwspace",
        description="VW-path covers, the (2-eps) Hall-type covering "
                    "criterion, the cover game, and proof-space "
                    "measurement for resolution and polynomial calculus.",
        epilog="Rationals are exact 'p/q' strings.  VWSPACE_CACHE_DIR "
               "points hypergraph searches at a persistent cache.")
    parser.add_argument("--version", action="version",
                        version="vwspace " + __version__)
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="command")

    p = sub.add_parser("gen", parents=[common],
                       help="generate a random 3-CNF in DIMACS format")
    p.add_argument("-n", type=int, required=True, help="variable count")
    p.add_argument("-d", "--delta", type=rational, default=Fraction(6),
                   help="clause density m/n (default 6)")
    p.add_argument("-s", dest="seed", type=int, default=argparse.SUPPRESS,
                   help="alias for --seed")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("graph", parents=[common],
                       help="clause-variable incidence graph of a CNF")
    p.add_argument("cnf", help="DIMACS input file")
    p.add_argument("-o", "--output",
                   help="graph output file (default stdout)")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("expander", parents=[common],
                       help="check (s, delta)-expansion of a bipartite graph")
    p.add_argument("graph", help="bigraph input file")
    p.add_argument("--s", type=int, required=True,
                   help="largest left set size to check")
    p.add_argument("--delta", type=rational, required=True,
                   help="required expansion factor")
    p.set_defaults(func=cmd_expander)

    p = sub.add_parser("vwcover", parents=[common],
                       help="find a VW-matching covering target left "
                            "vertices")
    p.add_argument("graph", help="bigraph input file")
    p.add_argument("--targets", type=vertex_list, default=None,
                   help="comma-separated left vertices (default: all)")
    p.add_argument("--ban-left", type=vertex_list, default=(),
                   help="left vertices removed from the graph")
    p.add_argument("--ban-right", type=vertex_list, default=(),
                   help="right vertices removed from the graph")
    p.set_defaults(func=cmd_vwcover)

    p = sub.add_parser("hall",
                       help="the Hall-type covering criterion and its "
                            "sharpness witnesses")
    hall_sub = p.add_subparsers(dest="mode", required=True, metavar="mode")

    q = hall_sub.add_parser("verify", parents=[common],
                            help="randomized counterexample search")
    q.add_argument("--epsilon", type=rational, required=True)
    q.add_argument("--max-left", type=int, default=6,
                   help="largest hyperedge count drawn (default 6)")
    q.add_argument("--samples", type=int, default=1000,
                   help="random hypergraphs drawn (default 1000)")
    q.set_defaults(func=cmd_hall)

    q = hall_sub.add_parser("counterexample", parents=[common],
                            help="smallest sharpness witness at a given "
                                 "epsilon")
    q.add_argument("--epsilon", type=rational, required=True,
                   help="criterion slack, must lie in (1/3, 1/2]")
    q.add_argument("--skip-verify", action="store_true",
                   help="emit the instance without re-checking it")
    q.add_argument("-o", "--output",
                   help="hypergraph output file (default stdout)")
    q.set_defaults(func=cmd_hall)

    q = hall_sub.add_parser("gadget", parents=[common],
                            help="amplified pendant-gadget hypergraph")
    q.add_argument("-n", type=int, default=1,
                   help="gluing steps (default 1)")
    q.add_argument("-o", "--output",
                   help="hypergraph output file (default stdout)")
    q.set_defaults(func=cmd_hall)

    p = sub.add_parser("covergame",
                       help="play the cover game on a bipartite graph")
    game_sub = p.add_subparsers(dest="mode", required=True, metavar="mode")
    q = game_sub.add_parser("play", parents=[common],
                            help="one game against a built-in adversary, "
                                 "or a REPL")
    q.add_argument("graph", help="bigraph input file")
    q.add_argument("--epsilon", type=rational, required=True)
    q.add_argument("-D", "--threshold", type=int, required=True,
                   help="degree threshold D")
    q.add_argument("--s", type=int, required=True, help="size budget s")
    q.add_argument("--adversary",
                   choices=("random", "greedy-degree", "exhaustive"),
                   default="random")
    q.add_argument("--mu", type=int, default=None,
                   help="component bound override (default: theorem value, "
                        "hypotheses enforced)")
    q.add_argument("--moves", type=int, default=24,
                   help="adversary move budget (default 24)")
    q.add_argument("--assume-expander", action="store_true",
                   help="vouch for expansion instead of checking it")
    q.add_argument("--interactive", action="store_true",
                   help="read moves from standard input")
    q.add_argument("--transcript", metavar="PATH",
                   help="write the move log to a file")
    q.set_defaults(func=cmd_covergame)

    p = sub.add_parser("certify", parents=[common],
                       help="extract and check a k-winning strategy "
                            "certificate")
    p.add_argument("cnf", help="DIMACS input file")
    p.add_argument("-k", type=int, default=2,
                   help="winning-strategy order (default 2)")
    p.add_argument("--epsilon", type=rational, default=Fraction(1, 24))
    p.add_argument("--s", type=int, default=4, help="size budget s")
    p.add_argument("--threshold", type=int, default=0,
                   help="degree threshold (default: max right degree)")
    p.add_argument("--mu", type=int, default=0,
                   help="component bound (default: k)")
    p.add_argument("--enforce", action="store_true",
                   help="enforce the budgeted matching property on every "
                        "membership test")
    p.add_argument("--check", metavar="PATH",
                   help="verify an existing certificate instead")
    p.add_argument("-o", "--output",
                   help="certificate file (default: <cnf>.kwin)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("space", parents=[common],
                       help="verify a refutation trace and measure space")
    p.add_argument("cnf", help="DIMACS input file")
    p.add_argument("trace", help="trace input file")
    p.add_argument("--system", choices=("res", "pcr"), default="res")
    p.add_argument("--field", default="q",
                   help="coefficient field for pcr: q or a prime "
                        "(default q)")
    p.set_defaults(func=cmd_space)

    p = sub.add_parser("stats", parents=[common],
                       help="variable degree profile and concentration "
                            "verdict")
    p.add_argument("cnf", help="DIMACS input file")
    p.add_argument("--epsilon", type=rational, default=Fraction(1, 24))
    p.add_argument("--c", type=rational, default=Fraction(1),
                   help="right-hand constant in the degree demand "
                        "(default 1)")
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except HypothesisError as exc:
        print("hypotheses rejected: %s" % exc, file=sys.stderr)
        for item in exc.items:
            print("  - %s" % item, file=sys.stderr)
        return EXIT_NEGATIVE
    except (ValidationError, FormatError, GameRuleError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except ResourceCapError as exc:
        print("resource cap: %s" % exc, file=sys.stderr)
        return EXIT_CAP
    except InconsistencyError as exc:
        print("internal inconsistency: %s" % exc, file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        name = getattr(exc, "filename", None)
        print("error: %s: %s" % (name if name is not None else "i/o",
                                 exc.strerror or exc), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
