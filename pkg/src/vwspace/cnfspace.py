"""CNF formulas, their polynomial translation, and space measures.

Clauses are DIMACS-style tuples of signed variable indices.  The
polynomial side works in the ring over twinned variables x, x_bar with
multilinear monomials: a monomial is a set of ring literals, where the
ring literal +v stands for x_v and -v for its twin.  The translation
maps a clause to the product of the complemented literals, so the
polynomial vanishes exactly when the clause is satisfied.

Resolution and polynomial-calculus memory traces are verified step by
step against the syntactic rules; the verifiers compute the space
measures (total space with repetitions, distinct-monomial space) along
the way and never accept semantic shortcuts.
"""

from __future__ import annotations

import itertools
import random
import re
import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .errors import (
    FormatError,
    ResourceCapError,
    ValidationError,
)
from .graph import BipartiteGraph, as_fraction, build_graph

__all__ = [
    "Cnf",
    "cnf",
    "clause_of",
    "clause_width",
    "is_tautology",
    "evaluate_clause",
    "parse_dimacs",
    "write_dimacs",
    "gen_random_cnf",
    "adjacency_graph",
    "Polynomial",
    "polynomial",
    "poly_zero",
    "poly_const",
    "lin_comb",
    "var_mult",
    "evaluate_poly",
    "parse_poly",
    "write_poly",
    "tr_literal",
    "tr_clause",
    "tr_encode",
    "boolean_axioms",
    "total_space",
    "monomial_space",
    "ResAxiom",
    "ResInfer",
    "ResErase",
    "PcrAxiom",
    "PcrLin",
    "PcrMul",
    "PcrSem",
    "PcrErase",
    "ResReport",
    "PcrReport",
    "verify_res_trace",
    "verify_pcr_trace",
    "parse_res_trace",
    "write_res_trace",
    "parse_pcr_trace",
    "write_pcr_trace",
    "degree_stats",
    "check_concentration",
    "euler_fraction",
    "min_space_search",
]


# ---------------------------------------------------------------------------
# clauses and formulas

Clause = tuple[int, ...]


def clause_of(literals: Iterable[int]) -> Clause:
    """Normalize a clause: distinct literals sorted by (variable, sign)."""
    lits = set()
    for lit in literals:
        if lit == 0 or not isinstance(lit, int):
            raise ValidationError("bad literal %r" % (lit,))
        lits.add(lit)
    return tuple(sorted(lits, key=lambda l: (abs(l), l < 0)))


def clause_width(clause: Clause) -> int:
    return len(clause)


def is_tautology(clause: Clause) -> bool:
    return any(-lit in clause for lit in clause)


def evaluate_clause(clause: Clause, assignment: dict[int, int]) -> Optional[bool]:
    """True if a literal is satisfied, False if all falsified, else None."""
    unknown = False
    for lit in clause:
        val = assignment.get(abs(lit))
        if val is None:
            unknown = True
        elif (val == 1) == (lit > 0):
            return True
    return None if unknown else False


@dataclass(frozen=True)
class Cnf:
    variable_count: int
    clauses: tuple[Clause, ...]

    def is_three_cnf(self) -> bool:
        return all(len({abs(l) for l in c}) == 3 and len(c) == 3
                   and not is_tautology(c) for c in self.clauses)


def cnf(variable_count: int, clauses: Iterable[Iterable[int]]) -> Cnf:
    if variable_count < 0:
        raise ValidationError("variable count must be non-negative")
    norm = []
    for c in clauses:
        t = clause_of(c)
        if t and abs(t[-1]) > variable_count:
            raise ValidationError("literal %d beyond variable count %d"
                                  % (t[-1], variable_count))
        norm.append(t)
    return Cnf(variable_count=variable_count, clauses=tuple(norm))


def parse_dimacs(text: str) -> Cnf:
    header = None
    clauses: list[list[int]] = []
    pending: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise FormatError("line %d: bad header %r" % (lineno, line))
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError as exc:
                raise FormatError("line %d: bad header numbers" % lineno) from exc
            continue
        if header is None:
            raise FormatError("line %d: clause before header" % lineno)
        try:
            nums = [int(tok) for tok in line.split()]
        except ValueError as exc:
            raise FormatError("line %d: bad literal in %r" % (lineno, line)) from exc
        for num in nums:
            if num == 0:
                clauses.append(pending)
                pending = []
            else:
                pending.append(num)
    if pending:
        raise FormatError("unterminated clause at end of file")
    if header is None:
        raise FormatError("missing 'p cnf' header")
    if len(clauses) != header[1]:
        raise FormatError("header declares %d clauses, found %d"
                          % (header[1], len(clauses)))
    try:
        return cnf(header[0], clauses)
    except ValidationError as exc:
        raise FormatError(str(exc)) from exc


def write_dimacs(phi: Cnf, comments: Iterable[str] = ()) -> str:
    lines = ["c %s" % c if c else "c" for c in comments]
    lines.append("p cnf %d %d" % (phi.variable_count, len(phi.clauses)))
    for c in phi.clauses:
        lines.append(" ".join(str(l) for l in c) + " 0")
    return "\n".join(lines) + "\n"


def gen_random_cnf(n: int, delta, seed: int) -> Cnf:
    """floor(delta*n) clauses drawn i.i.d. uniformly over all clauses
    with 3 distinct variables and no tautology, signs uniform."""
    if n < 3:
        raise ValidationError("need at least 3 variables, got %d" % n)
    d = as_fraction(delta)
    if d < 0:
        raise ValidationError("clause density must be non-negative")
    m = int(d * n)
    rng = random.Random(seed)
    clauses = []
    for _ in range(m):
        variables = sorted(rng.sample(range(1, n + 1), 3))
        clauses.append(tuple(v if rng.getrandbits(1) else -v
                             for v in variables))
    return Cnf(variable_count=n, clauses=tuple(clauses))


def adjacency_graph(phi: Cnf) -> BipartiteGraph:
    """Clause-variable incidence: left = clauses, right = variables."""
    pairs = [(i, abs(lit) - 1) for i, c in enumerate(phi.clauses) for lit in c]
    return build_graph(pairs, len(phi.clauses), phi.variable_count)


# ---------------------------------------------------------------------------
# polynomials

Monomial = tuple[int, ...]


def _mono_key(mono: Monomial) -> tuple:
    return (-len(mono), tuple((abs(l), l < 0) for l in mono))


def _mono_of(literals: Iterable[int]) -> tuple[Monomial, bool]:
    """Monomial from ring literals; the flag records a collapsed square."""
    seq = list(literals)
    seen = set(seq)
    if 0 in seen:
        raise ValidationError("0 is not a ring literal")
    mono = tuple(sorted(seen, key=lambda l: (abs(l), l < 0)))
    return mono, len(mono) < len(seq)


@dataclass(frozen=True)
class Polynomial:
    """Multilinear polynomial over the twinned variables.

    ``terms`` maps monomials (sorted tuples of ring literals) to nonzero
    coefficients; ``field`` is None for rationals or a prime modulus.
    The ``reduced`` flag records whether a square was collapsed during
    construction; it is provenance, not value, and is excluded from
    equality.
    """

    terms: tuple[tuple[Monomial, Union[Fraction, int]], ...]
    field: Optional[int] = None
    reduced: bool = dataclasses.field(default=False, compare=False)

    def coefficient(self, mono: Monomial):
        for m, c in self.terms:
            if m == mono:
                return c
        return Fraction(0) if self.field is None else 0

    def monomials(self) -> tuple[Monomial, ...]:
        return tuple(m for m, _ in self.terms)

    def is_zero(self) -> bool:
        return not self.terms


def _norm_coeff(value, field_: Optional[int]):
    if field_ is None:
        return Fraction(value)
    as_frac = Fraction(value)
    if as_frac.denominator != 1:
        raise ValidationError(
            "coefficient %s is not integral over GF(%d)" % (as_frac, field_))
    return as_frac.numerator % field_


def polynomial(term_map: dict, field: Optional[int] = None,
               reduced: bool = False) -> Polynomial:
    """Build a polynomial from {iterable-of-ring-literals: coefficient}."""
    if field is not None and field < 2:
        raise ValidationError("field modulus must be at least 2")
    acc: dict[Monomial, Union[Fraction, int]] = {}
    collapsed = reduced
    for lits, coeff in term_map.items():
        mono, did = _mono_of(lits)
        collapsed = collapsed or did
        acc[mono] = _norm_coeff(acc.get(mono, 0) + _norm_coeff(coeff, field),
                                field)
    items = tuple(sorted(((m, c) for m, c in acc.items() if c != 0),
                         key=lambda mc: _mono_key(mc[0])))
    return Polynomial(terms=items, field=field, reduced=collapsed)


def poly_zero(field: Optional[int] = None) -> Polynomial:
    return polynomial({}, field)


def poly_const(value, field: Optional[int] = None) -> Polynomial:
    return polynomial({(): value}, field)


def _require_same_field(p: Polynomial, q: Polynomial) -> None:
    if p.field != q.field:
        raise ValidationError("mixed coefficient fields")


def lin_comb(alpha, p: Polynomial, beta, q: Polynomial) -> Polynomial:
    _require_same_field(p, q)
    acc = {m: _norm_coeff(alpha, p.field) * c for m, c in p.terms}
    for m, c in q.terms:
        acc[m] = acc.get(m, 0) + _norm_coeff(beta, p.field) * c
    return polynomial({m: c for m, c in acc.items()}, p.field)


def var_mult(ring_literal: int, p: Polynomial) -> Polynomial:
    """Multiply by x_v (+v) or its twin (-v); squares collapse and are
    flagged on the result."""
    if ring_literal == 0:
        raise ValidationError("0 is not a ring literal")
    acc: dict[Monomial, Union[Fraction, int]] = {}
    collapsed = False
    for m, c in p.terms:
        mono, did = _mono_of(m + (ring_literal,))
        collapsed = collapsed or did
        acc[mono] = acc.get(mono, 0) + c
    out = polynomial(dict(acc), p.field)
    return Polynomial(terms=out.terms, field=out.field, reduced=collapsed)


def evaluate_poly(p: Polynomial, assignment: dict[int, int]) -> Polynomial:
    """Substitute x_v -> value and twin -> 1 - value for assigned v."""
    acc: dict[Monomial, Union[Fraction, int]] = {}
    for m, c in p.terms:
        dead = False
        rest = []
        for lit in m:
            val = assignment.get(abs(lit))
            if val is None:
                rest.append(lit)
                continue
            if lit < 0:
                val = 1 - val
            if val == 0:
                dead = True
                break
        if dead:
            continue
        mono, _ = _mono_of(rest)
        acc[mono] = acc.get(mono, 0) + c
    return polynomial(dict(acc), p.field)


_TERM_RE = re.compile(r"^(?:(\d+(?:/\d+)?)\*?)?((?:~?x\d+)(?:\*~?x\d+)*)?$")


def parse_poly(text: str, field: Optional[int] = None) -> Polynomial:
    s = text.strip().replace(" ", "")
    if not s:
        raise FormatError("empty polynomial")
    if s == "0":
        return poly_zero(field)
    # split into signed terms
    chunks: list[tuple[int, str]] = []
    sign, start = 1, 0
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        start = 1
    buf = ""
    for ch in s[start:]:
        if ch in "+-":
            chunks.append((sign, buf))
            sign = -1 if ch == "-" else 1
            buf = ""
        else:
            buf += ch
    chunks.append((sign, buf))
    terms: dict[tuple[int, ...], Union[Fraction, int]] = {}
    for sgn, chunk in chunks:
        m = _TERM_RE.match(chunk)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise FormatError("bad polynomial term %r" % chunk)
        coeff = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        lits: list[int] = []
        if m.group(2):
            for factor in m.group(2).split("*"):
                neg = factor.startswith("~")
                lits.append((-1 if neg else 1) * int(factor.lstrip("~x")))
        key = tuple(lits)
        terms[key] = terms.get(key, 0) + sgn * coeff
    try:
        return polynomial(terms, field)
    except ValidationError as exc:
        raise FormatError(str(exc)) from exc


def write_poly(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    out = ""
    for i, (mono, coeff) in enumerate(p.terms):
        if p.field is None and coeff < 0:
            negative, mag = True, -coeff
        else:
            negative, mag = False, coeff
        body = "*".join(("~x%d" % -l) if l < 0 else ("x%d" % l) for l in mono)
        if not body:
            piece = str(mag)
        elif mag == 1:
            piece = body
        else:
            piece = "%s*%s" % (mag, body)
        if i == 0:
            out = ("-" + piece) if negative else piece
        else:
            out += (" - " if negative else " + ") + piece
    return out


# ---------------------------------------------------------------------------
# the tr translation


def tr_literal(literal: int) -> int:
    """A clause literal maps to the ring literal that vanishes when the
    clause literal is satisfied: x -> twin of x, negated x -> x."""
    if literal == 0:
        raise ValidationError("0 is not a literal")
    return -literal


def tr_clause(clause: Clause, field: Optional[int] = None) -> Polynomial:
    return polynomial({tuple(tr_literal(l) for l in clause): 1}, field)


def boolean_axioms(variable: int, field: Optional[int] = None
                   ) -> tuple[Polynomial, Polynomial]:
    """The square axiom (zero here, since monomials are multilinear;
    the collapse is flagged) and the twin-sum axiom x + x_bar - 1."""
    square = polynomial({(variable, variable): 1, (variable,): -1}, field)
    twin = polynomial({(variable,): 1, (-variable,): 1, (): -1}, field)
    return square, twin


def tr_encode(phi: Cnf, field: Optional[int] = None) -> tuple[Polynomial, ...]:
    """Clause translations followed by both boolean axioms per variable."""
    out = [tr_clause(c, field) for c in phi.clauses]
    for v in range(1, phi.variable_count + 1):
        out.extend(boolean_axioms(v, field))
    return tuple(out)


# ---------------------------------------------------------------------------
# space measures


def total_space(config: Iterable[Clause]) -> int:
    """Literal occurrences counted with repetitions."""
    return sum(len(c) for c in config)


def monomial_space(config: Iterable[Polynomial]) -> int:
    """Distinct monomials across the configuration."""
    return len({m for p in config for m in p.monomials()})


# ---------------------------------------------------------------------------
# resolution traces


@dataclass(frozen=True)
class ResAxiom:
    clause: Clause


@dataclass(frozen=True)
class ResInfer:
    left: int
    right: int
    clause: Clause


@dataclass(frozen=True)
class ResErase:
    index: int


ResStep = Union[ResAxiom, ResInfer, ResErase]


@dataclass(frozen=True)
class ResReport:
    ok: bool
    failed_step: Optional[int]
    reason: Optional[str]
    steps: int
    max_total_space: int
    max_clause_count: int
    max_width: int
    width_profile: tuple[int, ...]
    refutation: bool

    def passes_width(self, w: int) -> bool:
        """True if some configuration held at least w clauses of width
        at least w."""
        if w <= 0:
            return True
        if w >= len(self.width_profile):
            return False
        return self.width_profile[w] >= w


def _resolvents(left: Clause, right: Clause) -> list[Clause]:
    out = []
    for lit in left:
        if -lit in right:
            merged = [l for l in left if l != lit]
            merged += [l for l in right if l != -lit]
            out.append(clause_of(merged))
    return out


def verify_res_trace(phi: Cnf, trace: Iterable[ResStep]) -> ResReport:
    axioms = set(phi.clauses)
    config: list[Clause] = []
    max_total = max_count = max_width = 0
    profile: list[int] = [0]
    ok, failed, reason = True, None, None
    steps = 0

    def snapshot() -> None:
        nonlocal max_total, max_count, max_width
        max_total = max(max_total, total_space(config))
        max_count = max(max_count, len(config))
        for c in config:
            max_width = max(max_width, len(c))
        while len(profile) <= max_width:
            profile.append(0)
        for w in range(len(profile)):
            profile[w] = max(profile[w],
                             sum(1 for c in config if len(c) >= w))

    for idx, step in enumerate(trace):
        steps += 1
        if isinstance(step, ResAxiom):
            if step.clause not in axioms:
                ok, failed, reason = False, idx, "axiom not in the formula"
                break
            config.append(step.clause)
        elif isinstance(step, ResInfer):
            if not (0 <= step.left < len(config)
                    and 0 <= step.right < len(config)):
                ok, failed, reason = False, idx, "premise index out of range"
                break
            allowed = _resolvents(config[step.left], config[step.right])
            if step.clause not in allowed:
                ok, failed, reason = (False, idx,
                                      "result is not a resolvent of the premises")
                break
            config.append(step.clause)
        elif isinstance(step, ResErase):
            if not (0 <= step.index < len(config)):
                ok, failed, reason = False, idx, "erase index out of range"
                break
            config.pop(step.index)
        else:
            ok, failed, reason = False, idx, "unknown step kind"
            break
        snapshot()

    return ResReport(ok=ok, failed_step=failed, reason=reason, steps=steps,
                     max_total_space=max_total, max_clause_count=max_count,
                     max_width=max_width, width_profile=tuple(profile),
                     refutation=ok and () in config)


def parse_res_trace(text: str) -> tuple[ResStep, ...]:
    steps: list[ResStep] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "A":
                nums = [int(t) for t in parts[1:]]
                if not nums or nums[-1] != 0:
                    raise FormatError("line %d: clause not 0-terminated" % lineno)
                steps.append(ResAxiom(clause_of(nums[:-1])))
            elif parts[0] == "I":
                if len(parts) < 5 or parts[1] != "res":
                    raise FormatError("line %d: bad inference %r" % (lineno, line))
                nums = [int(t) for t in parts[2:]]
                if nums[-1] != 0:
                    raise FormatError("line %d: clause not 0-terminated" % lineno)
                steps.append(ResInfer(nums[0], nums[1], clause_of(nums[2:-1])))
            elif parts[0] == "E":
                if len(parts) != 2:
                    raise FormatError("line %d: bad erasure" % lineno)
                steps.append(ResErase(int(parts[1])))
            else:
                raise FormatError("line %d: unknown record %r" % (lineno, line))
        except FormatError:
            raise
        except (ValueError, ValidationError) as exc:
            raise FormatError("line %d: %s" % (lineno, exc)) from exc
    return tuple(steps)


def write_res_trace(trace: Iterable[ResStep]) -> str:
    lines = []
    for step in trace:
        if isinstance(step, ResAxiom):
            lines.append("A " + " ".join(str(l) for l in step.clause + (0,)))
        elif isinstance(step, ResInfer):
            lines.append("I res %d %d " % (step.left, step.right)
                         + " ".join(str(l) for l in step.clause + (0,)))
        elif isinstance(step, ResErase):
            lines.append("E %d" % step.index)
        else:
            raise ValidationError("unknown step %r" % (step,))
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# polynomial calculus traces


@dataclass(frozen=True)
class PcrAxiom:
    poly: Polynomial


@dataclass(frozen=True)
class PcrLin:
    left: int
    right: int
    alpha: Fraction
    beta: Fraction
    poly: Polynomial


@dataclass(frozen=True)
class PcrMul:
    operand: int
    ring_literal: int
    poly: Polynomial


@dataclass(frozen=True)
class PcrSem:
    poly: Polynomial


@dataclass(frozen=True)
class PcrErase:
    index: int


PcrStep = Union[PcrAxiom, PcrLin, PcrMul, PcrSem, PcrErase]


@dataclass(frozen=True)
class PcrReport:
    ok: bool
    failed_step: Optional[int]
    reason: Optional[str]
    steps: int
    max_monomial_space: int
    reduced_steps: tuple[int, ...]
    refutation: bool


def verify_pcr_trace(axioms: Iterable[Polynomial],
                     trace: Iterable[PcrStep]) -> PcrReport:
    allowed = list(axioms)
    config: list[Polynomial] = []
    max_mono = 0
    reduced: list[int] = []
    ok, failed, reason = True, None, None
    steps = 0
    one = None

    for idx, step in enumerate(trace):
        steps += 1
        if isinstance(step, PcrAxiom):
            if step.poly not in allowed:
                ok, failed, reason = False, idx, "axiom not in the axiom set"
                break
            config.append(step.poly)
        elif isinstance(step, PcrLin):
            if not (0 <= step.left < len(config)
                    and 0 <= step.right < len(config)):
                ok, failed, reason = False, idx, "operand index out of range"
                break
            want = lin_comb(step.alpha, config[step.left],
                            step.beta, config[step.right])
            if step.poly != want:
                ok, failed, reason = (False, idx,
                                      "result differs from the combination")
                break
            config.append(step.poly)
        elif isinstance(step, PcrMul):
            if not (0 <= step.operand < len(config)):
                ok, failed, reason = False, idx, "operand index out of range"
                break
            want = var_mult(step.ring_literal, config[step.operand])
            if step.poly != want:
                ok, failed, reason = (False, idx,
                                      "result differs from the product")
                break
            if want.reduced:
                reduced.append(idx)
            config.append(step.poly)
        elif isinstance(step, PcrSem):
            ok, failed, reason = False, idx, "semantic step unsupported"
            break
        elif isinstance(step, PcrErase):
            if not (0 <= step.index < len(config)):
                ok, failed, reason = False, idx, "erase index out of range"
                break
            config.pop(step.index)
        else:
            ok, failed, reason = False, idx, "unknown step kind"
            break
        max_mono = max(max_mono, monomial_space(config))

    if config:
        one = poly_const(1, config[0].field)
    return PcrReport(ok=ok, failed_step=failed, reason=reason, steps=steps,
                     max_monomial_space=max_mono,
                     reduced_steps=tuple(reduced),
                     refutation=ok and one is not None and one in config)


def _frac_str(value) -> str:
    return str(Fraction(value))


def parse_pcr_trace(text: str, field: Optional[int] = None
                    ) -> tuple[PcrStep, ...]:
    steps: list[PcrStep] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        try:
            if line.startswith("A "):
                steps.append(PcrAxiom(parse_poly(line[2:], field)))
            elif line.startswith("I "):
                head, sep, tail = line.partition(";")
                if not sep:
                    raise FormatError("line %d: missing ';' result" % lineno)
                parts = head.split()
                poly = parse_poly(tail, field)
                if parts[1] == "lin":
                    steps.append(PcrLin(int(parts[2]), int(parts[3]),
                                        Fraction(parts[4]), Fraction(parts[5]),
                                        poly))
                elif parts[1] == "mul":
                    lit = parts[3]
                    neg = lit.startswith("~")
                    steps.append(PcrMul(int(parts[2]),
                                        (-1 if neg else 1) * int(lit.lstrip("~x")),
                                        poly))
                elif parts[1] == "sem":
                    steps.append(PcrSem(poly))
                else:
                    raise FormatError("line %d: unknown rule %r" % (lineno, parts[1]))
            elif line.startswith("E "):
                steps.append(PcrErase(int(line[2:])))
            else:
                raise FormatError("line %d: unknown record %r" % (lineno, line))
        except FormatError:
            raise
        except (ValueError, IndexError) as exc:
            raise FormatError("line %d: %s" % (lineno, exc)) from exc
    return tuple(steps)


def write_pcr_trace(trace: Iterable[PcrStep]) -> str:
    lines = []
    for step in trace:
        if isinstance(step, PcrAxiom):
            lines.append("A " + write_poly(step.poly))
        elif isinstance(step, PcrLin):
            lines.append("I lin %d %d %s %s ; %s"
                         % (step.left, step.right, _frac_str(step.alpha),
                            _frac_str(step.beta), write_poly(step.poly)))
        elif isinstance(step, PcrMul):
            lit = ("~x%d" % -step.ring_literal if step.ring_literal < 0
                   else "x%d" % step.ring_literal)
            lines.append("I mul %d %s ; %s"
                         % (step.operand, lit, write_poly(step.poly)))
        elif isinstance(step, PcrSem):
            lines.append("I sem ; " + write_poly(step.poly))
        elif isinstance(step, PcrErase):
            lines.append("E %d" % step.index)
        else:
            raise ValidationError("unknown step %r" % (step,))
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# degree statistics


def degree_stats(phi: Cnf) -> dict[int, int]:
    """|S_d| for every d from 1 to the maximum variable degree, where
    S_d is the set of variables contained in at least d clauses."""
    counts = [0] * (phi.variable_count + 1)
    for c in phi.clauses:
        for v in {abs(l) for l in c}:
            counts[v] += 1
    if not phi.clauses:
        return {}
    maxdeg = max(counts)
    out = {}
    for d in range(1, maxdeg + 1):
        out[d] = sum(1 for v in range(1, phi.variable_count + 1)
                     if counts[v] >= d)
    return out


def euler_fraction() -> tuple[Fraction, Fraction]:
    """A tight rational enclosure of Euler's number from the factorial
    series; wide enough for any ceiling computed here to be unambiguous."""
    low = Fraction(0)
    fact = 1
    for k in range(0, 25):
        if k:
            fact *= k
        low += Fraction(1, fact)
    high = low + Fraction(2, fact * 25)
    return low, high


def check_concentration(phi: Cnf, epsilon, c) -> Optional[int]:
    """Least D at or above ceil(24*e*delta) such that
    72d/eps*(|S_d|+d)+1 <= c*n for every degree d from D up to the
    maximum variable degree, or None if no such D exists."""
    eps = as_fraction(epsilon)
    bound_c = as_fraction(c)
    if eps <= 0:
        raise ValidationError("epsilon must be positive")
    n = phi.variable_count
    if n == 0:
        raise ValidationError("formula has no variables")
    delta = Fraction(len(phi.clauses), n)
    lo, hi = euler_fraction()
    floor_low = (24 * lo * delta).__floor__()
    start = floor_low + (0 if 24 * lo * delta == floor_low else 1)
    check = (24 * hi * delta).__floor__()
    check += 0 if 24 * hi * delta == check else 1
    assert start == check, "e enclosure too wide for this ceiling"

    stats = degree_stats(phi)
    maxdeg = max(stats) if stats else 0

    def holds(d: int) -> bool:
        sd = stats.get(d, 0)
        return Fraction(72 * d, 1) / eps * (sd + d) + 1 <= bound_c * n

    # degrees beyond the maximum do not occur, so the demand is checked
    # on [D, maxdeg]; with no high-degree variables at all it is vacuous
    if start > maxdeg:
        return start
    for cand in range(start, maxdeg + 1):
        if all(holds(d) for d in range(cand, maxdeg + 1)):
            return cand
    return None


# ---------------------------------------------------------------------------
# micro-scale minimum-space search


def min_space_search(phi: Cnf, clause_budget: int,
                     width_budget: int) -> Optional[tuple[ResStep, ...]]:
    """Exhaustive search for a resolution refutation whose every
    configuration stays within the clause-count and width budgets.

    Breadth-first over reachable clause sets, so absence of a result is
    a verified impossibility at this scale.  An inference transition may
    retire either premise as it fires, which is what makes the budget a
    bound on what is ever retained; the returned trace expands such a
    transition into the inference followed by explicit erasures, so it
    verifies under the plain step rules (where the premises transiently
    coexist with the resolvent).  Hard caps: 4 variables, budgets of 4.
    """
    if phi.variable_count > 4:
        raise ResourceCapError("search capped at 4 variables")
    if clause_budget > 4 or width_budget > 4:
        raise ResourceCapError("search capped at budgets of 4")
    if clause_budget < 0 or width_budget < 0:
        raise ValidationError("budgets must be non-negative")
    if clause_budget == 0:
        return None

    axioms = sorted(set(c for c in phi.clauses if len(c) <= width_budget))
    start: tuple[Clause, ...] = ()
    parents: dict[tuple[Clause, ...], tuple] = {start: ()}
    queue = [start]
    state_cap = 10 ** 6
    goal = None
    while queue and goal is None:
        nxt = []
        for config in queue:
            if () in config:
                goal = config
                break
            moves: list[tuple[tuple[Clause, ...], tuple]] = []
            if len(config) < clause_budget:
                for ax in axioms:
                    if ax not in config:
                        moves.append((tuple(sorted(config + (ax,))),
                                      ("axiom", ax)))
            for ca, cb in itertools.permutations(config, 2):
                for res in _resolvents(ca, cb):
                    if len(res) > width_budget:
                        continue
                    for retire in ((), (ca,), (cb,), (ca, cb)):
                        kept = tuple(c for c in config if c not in retire)
                        state = tuple(sorted(set(kept + (res,))))
                        if len(state) <= clause_budget:
                            moves.append((state, ("infer", ca, cb, res, retire)))
            for i, cl in enumerate(config):
                moves.append((config[:i] + config[i + 1:], ("erase", cl)))
            for state, move in moves:
                if state not in parents:
                    parents[state] = (config, move)
                    nxt.append(state)
            if len(parents) > state_cap:
                raise ResourceCapError("state space cap exceeded")
        queue = nxt
    if goal is None:
        return None

    chain = []
    cur = goal
    while parents[cur]:
        prev, move = parents[cur]
        chain.append(move)
        cur = prev
    chain.reverse()
    ordered: list[Clause] = []
    steps: list[ResStep] = []
    for move in chain:
        if move[0] == "axiom":
            steps.append(ResAxiom(move[1]))
            ordered.append(move[1])
        elif move[0] == "infer":
            _, ca, cb, res, retire = move
            steps.append(ResInfer(ordered.index(ca), ordered.index(cb), res))
            ordered.append(res)
            for victim in retire:
                i = ordered.index(victim)
                steps.append(ResErase(i))
                ordered.pop(i)
        else:
            i = ordered.index(move[1])
            steps.append(ResErase(i))
            ordered.pop(i)
    return tuple(steps)
