"""Example machines and reductions.

Contains the repetition-language DSA, the composite-length NSA, the
circuit-value and 3-SAT reductions with their direct evaluators, the
space-bounded Turing-machine simulation on a unary work alphabet, and the
membership-to-emptiness construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Union

from .automata import Word
from .core import (END, InRule, NotDeterministic, OutRule, SetAutomaton,
                   TestRule, TransitionRule, WriteRule)
from .normalform import remove_eps_loops

# ---------------------------------------------------------------------------
# repetitions of a word


def build_perk_dsa(k: int) -> SetAutomaton:
    """Deterministic machine for {(w#)^n : w over 0..k-1, n >= 1}.

    The first block is copied to the tape and inserted on '#'; every further
    block is copied and tested on '#'.  The machine accepts at the endmarker
    only when it sits right after a delimiter.  The empty input is rejected
    (n >= 1).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    digits = tuple(str(d) for d in range(k))
    sigma = digits + ("#",)
    rules: list[TransitionRule] = []
    for d in digits:
        rules.append(WriteRule("copy1", d, (d,), "copy1"))
        rules.append(WriteRule("after", d, (d,), "mid"))
        rules.append(WriteRule("mid", d, (d,), "mid"))
    rules.append(InRule("copy1", "#", "after"))
    rules.append(TestRule("after", "#", "after", "dead"))
    rules.append(TestRule("mid", "#", "after", "dead"))
    rules.append(WriteRule("after", END, (), "acc"))
    return SetAutomaton(
        states={"copy1", "after", "mid", "dead", "acc"},
        input_alphabet=sigma,
        work_alphabet=digits,
        uses_endmarker=True,
        transitions=rules,
        initial="copy1",
        accepting={"acc"},
    )


def perk_predicate(word: Word, k: int) -> bool:
    """Direct oracle: is the word (w#)^n for some w over 0..k-1 and n >= 1?"""
    digits = {str(d) for d in range(k)}
    if any(s not in digits and s != "#" for s in word):
        return False
    text = "".join(word)
    if not text.endswith("#"):
        return False
    chunks = text.split("#")[:-1]
    return len(chunks) >= 1 and len(set(chunks)) == 1


# ---------------------------------------------------------------------------
# non-prime lengths


def build_nonprimes_nsa() -> SetAutomaton:
    """Machine over {a} accepting a^n exactly when n is 0, 1 or composite.

    A run guesses a divisor k >= 2 by copying k letters and inserting a^k,
    then repeatedly copies letters and tests, nondeterministically placing
    each test; it accepts only when a positive test lands on the last letter,
    forcing n = k*m with m >= 2.  The empty word and the single letter have
    dedicated accepting paths.
    """
    rules: list[TransitionRule] = [
        WriteRule("s", None, (), "eps_ok"),        # n = 0
        WriteRule("s", "a", (), "one_ok"),         # n = 1
        WriteRule("s", "a", ("a",), "p1"),
        WriteRule("p1", "a", ("a",), "p2"),
        WriteRule("p2", "a", ("a",), "p2"),
        InRule("p2", None, "t0"),
        WriteRule("t0", "a", ("a",), "t1"),
        WriteRule("t1", "a", ("a",), "t1"),
        TestRule("t1", None, "hit", "dead"),
        WriteRule("hit", "a", ("a",), "t1"),
    ]
    return SetAutomaton(
        states={"s", "eps_ok", "one_ok", "p1", "p2", "t0", "t1", "hit", "dead"},
        input_alphabet=("a",),
        work_alphabet=("a",),
        uses_endmarker=False,
        transitions=rules,
        initial="s",
        accepting={"eps_ok", "one_ok", "hit"},
    )


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# circuit value programs


@dataclass(frozen=True)
class Assignment:
    target: int
    op: str                      # 'AND' | 'OR' | 'NOT' | 'ONE' | 'ZERO'
    left: Optional[int] = None
    right: Optional[int] = None


@dataclass(frozen=True)
class CvpProgram:
    """A sequence of assignments over indexed variables.

    Standard programs must assign each variable from already-assigned,
    lower-indexed operands; the reversed surface form emitted for the set
    automaton allows reassignment, which the direct evaluator also handles
    (unassigned variables read as zero).
    """

    assignments: tuple[Assignment, ...]

    def __post_init__(self):
        if not self.assignments:
            raise ValueError("a program needs at least one assignment")
        for a in self.assignments:
            if a.op in ("AND", "OR"):
                if a.left is None or a.right is None:
                    raise ValueError(f"binary assignment needs two operands: {a}")
            elif a.op == "NOT":
                if a.left is None or a.right is not None:
                    raise ValueError(f"negation takes one operand: {a}")
            elif a.op in ("ONE", "ZERO"):
                if a.left is not None or a.right is not None:
                    raise ValueError(f"constant assignment takes no operands: {a}")
            else:
                raise ValueError(f"unknown operation {a.op!r}")


def parse_cvp(text: str) -> CvpProgram:
    """One assignment per line: `P3 := P1 AND P2`, `P1 := 1`, `P4 := NOT P2`."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";")[0].strip()
        if not line:
            continue
        try:
            lhs, rhs = line.split(":=")
            target = _var_index(lhs.strip())
            toks = rhs.split()
            if toks == ["1"]:
                out.append(Assignment(target, "ONE"))
            elif toks == ["0"]:
                out.append(Assignment(target, "ZERO"))
            elif len(toks) == 2 and toks[0] == "NOT":
                out.append(Assignment(target, "NOT", _var_index(toks[1])))
            elif len(toks) == 3 and toks[1] in ("AND", "OR"):
                out.append(Assignment(target, toks[1], _var_index(toks[0]), _var_index(toks[2])))
            else:
                raise ValueError(f"bad right-hand side {rhs.strip()!r}")
        except ValueError as e:
            raise ValueError(f"line {lineno}: {e}") from None
    return CvpProgram(tuple(out))


def _var_index(tok: str) -> int:
    if not tok.startswith("P") or not tok[1:].isdigit():
        raise ValueError(f"bad variable {tok!r}")
    return int(tok[1:])


def cvp_eval(p: CvpProgram) -> int:
    """Direct evaluator: the value of the last assignment (variables start 0)."""
    env: dict[int, int] = {}
    value = 0
    for a in p.assignments:
        if a.op == "ONE":
            value = 1
        elif a.op == "ZERO":
            value = 0
        elif a.op == "NOT":
            value = 1 - env.get(a.left, 0)
        elif a.op == "AND":
            value = env.get(a.left, 0) & env.get(a.right, 0)
        else:
            value = env.get(a.left, 0) | env.get(a.right, 0)
        env[a.target] = value
    return value


def _code(i: int) -> tuple[str, ...]:
    return tuple(format(i, "b"))


CVP_TOKENS = ("AND", "OR", "NOT", "ONE", "ZERO")
CVP_ALPHABET = ("0", "1", "#") + CVP_TOKENS


def cvp_to_sacvp(p: CvpProgram) -> Word:
    """Reversed-assignment surface word: `#<Pj>#op#<Pk>#<Pi>#` per binary
    assignment, `#op#<Pi>#` for constants and negation, segments sharing
    delimiters."""
    out: list[str] = ["#"]
    for a in p.assignments:
        if a.op in ("AND", "OR"):
            out.extend(_code(a.left))
            out.append("#")
            out.append(a.op)
            out.append("#")
            out.extend(_code(a.right))
            out.append("#")
        elif a.op == "NOT":
            out.append("NOT")
            out.append("#")
            out.extend(_code(a.left))
            out.append("#")
        else:
            out.append(a.op)
            out.append("#")
        out.extend(_code(a.target))
        out.append("#")
    return tuple(out)


def build_sacvp_dsa() -> SetAutomaton:
    """Deterministic machine accepting reversed circuit-value words whose last
    assignment evaluates to one.

    The set holds the codes of currently-true variables: operand values come
    from tests, the computed result drives an insertion or removal of the
    target's code, and the running result is kept in the state.  Words
    outside the surface grammar get stuck.
    """
    rules: list[TransitionRule] = []
    states = set()

    def w(src, sym, word, dst):
        states.update((src, dst))
        rules.append(WriteRule(src, sym, word, dst))

    def test(src, sym, plus, minus):
        states.update((src, plus, minus))
        rules.append(TestRule(src, sym, plus, minus))

    def setop(kind, src, sym, dst):
        states.update((src, dst))
        rules.append((InRule if kind == "in" else OutRule)(src, sym, dst))

    # seg: expecting the first segment of an assignment (after a '#')
    w("start", "#", (), "seg:0")
    for r in ("0", "1"):
        seg = f"seg:{r}"
        # constant / negation openers
        w(seg, "ONE", (), f"const1:{r}")
        w(seg, "ZERO", (), f"const0:{r}")
        w(seg, "NOT", (), f"nothash:{r}")
        w(f"nothash:{r}", "#", (), f"notop:{r}")
        for d in "01":
            w(seg, d, (d,), f"left:{r}")
            w(f"left:{r}", d, (d,), f"left:{r}")
            w(f"notop:{r}", d, (d,), f"notcopy:{r}")
            w(f"notcopy:{r}", d, (d,), f"notcopy:{r}")
        w(f"const1:{r}", "#", (), "tgt:1")
        w(f"const0:{r}", "#", (), "tgt:0")
        test(f"notcopy:{r}", "#", "tgt:0", "tgt:1")
        # binary operand path: test left operand, read op, test right operand
        test(f"left:{r}", "#", f"op:{r}:1", f"op:{r}:0")
        for b in "01":
            w(f"op:{r}:{b}", "AND", (), f"rhash:{r}:AND:{b}")
            w(f"op:{r}:{b}", "OR", (), f"rhash:{r}:OR:{b}")
            for o in ("AND", "OR"):
                w(f"rhash:{r}:{o}:{b}", "#", (), f"right:{r}:{o}:{b}")
                for d in "01":
                    w(f"right:{r}:{o}:{b}", d, (d,), f"right:{r}:{o}:{b}")
                if o == "AND":
                    test(f"right:{r}:{o}:{b}", "#", f"tgt:{b}", "tgt:0")
                else:
                    test(f"right:{r}:{o}:{b}", "#", "tgt:1", f"tgt:{b}")
    # target copy: insert on result 1, remove on result 0
    for v in "01":
        for d in "01":
            w(f"tgt:{v}", d, (d,), f"tgtcopy:{v}")
            w(f"tgtcopy:{v}", d, (d,), f"tgtcopy:{v}")
        setop("in" if v == "1" else "out", f"tgtcopy:{v}", "#", f"seg:{v}")
    w("seg:1", END, (), "yes")
    states.add("yes")
    return SetAutomaton(
        states=states,
        input_alphabet=CVP_ALPHABET,
        work_alphabet=("0", "1"),
        uses_endmarker=True,
        transitions=rules,
        initial="start",
        accepting={"yes"},
    )


# ---------------------------------------------------------------------------
# 3-SAT


@dataclass(frozen=True)
class Literal:
    code: str        # binary variable code
    positive: bool

    def __post_init__(self):
        if not self.code or any(c not in "01" for c in self.code):
            raise ValueError(f"bad variable code {self.code!r}")


@dataclass(frozen=True)
class CnfFormula:
    clauses: tuple[tuple[Literal, Literal, Literal], ...]

    def variables(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for clause in self.clauses:
            for lit in clause:
                seen.setdefault(lit.code)
        return tuple(seen)


def parse_cnf(text: str) -> tuple[tuple[str, ...], CnfFormula]:
    """Variable-list header plus one clause per line:

        list 0 1 10
        clause +0 -1 +10
    """
    listed: tuple[str, ...] = ()
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";")[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "list":
            listed = tuple(toks[1:])
        elif toks[0] == "clause":
            if len(toks) != 4:
                raise ValueError(f"line {lineno}: a clause has exactly three literals")
            lits = []
            for t in toks[1:]:
                if t[0] not in "+-":
                    raise ValueError(f"line {lineno}: literal {t!r} needs a sign")
                lits.append(Literal(t[1:], t[0] == "+"))
            clauses.append(tuple(lits))
        else:
            raise ValueError(f"line {lineno}: unknown directive {toks[0]!r}")
    return listed, CnfFormula(tuple(clauses))


def phi_prime_sat(listed: tuple[str, ...], phi: CnfFormula) -> bool:
    """Brute-force oracle for the derived formula: clauses touching variables
    listed more than once are dropped, unlisted variables are fixed to zero,
    and the simplified formula is tested for satisfiability."""
    counts: dict[str, int] = {}
    for v in listed:
        counts[v] = counts.get(v, 0) + 1
    duplicated = {v for v, c in counts.items() if c >= 2}
    once = {v for v, c in counts.items() if c == 1}
    reduced = []
    for clause in phi.clauses:
        if any(lit.code in duplicated for lit in clause):
            continue
        lits = []
        satisfied = False
        for lit in clause:
            if lit.code in once:
                lits.append(lit)
            elif not lit.positive:
                satisfied = True   # unlisted variable is zero: a negative literal holds
        if satisfied:
            continue
        if not lits:
            return False           # an empty clause is unsatisfiable
        reduced.append(lits)
    if not reduced:
        return True
    variables = sorted({lit.code for clause in reduced for lit in clause})
    for bits in itertools.product((0, 1), repeat=len(variables)):
        env = dict(zip(variables, bits))
        if all(any(env[l.code] == (1 if l.positive else 0) for l in clause)
               for clause in reduced):
            return True
    return False


SASAT_ALPHABET = ("0", "1", "#", "(", ")", "+", "-", ",")


def sasat_word(listed: tuple[str, ...], phi: CnfFormula) -> Word:
    """The instance word: each listed code followed by '#', a closing '#',
    then `(<lit>,<lit>,<lit>)` per clause with `+code`/`-code` literals."""
    out: list[str] = []
    for v in listed:
        out.extend(v)
        out.append("#")
    out.append("#")
    for clause in phi.clauses:
        out.append("(")
        for i, lit in enumerate(clause):
            if i:
                out.append(",")
            out.append("+" if lit.positive else "-")
            out.extend(lit.code)
        out.append(")")
    return tuple(out)


def threesat_to_sasat(phi: CnfFormula) -> Word:
    """Straight reduction: list every formula variable exactly once."""
    return sasat_word(phi.variables(), phi)


def build_sasat_nsa() -> SetAutomaton:
    """Machine accepting instance words whose derived formula is satisfiable.

    While reading the list it guesses a value for each occurrence and inserts
    the pair (code, bit) as the tape word code+bit; a variable listed twice
    can thus have both pairs inserted.  Per clause it guesses a satisfying
    literal: a positive literal must find (x,1) in the set, a negative one
    either finds (x,0) or verifies (x,1) is absent.
    """
    rules: list[TransitionRule] = []
    states = {"L", "phi", "ok"}

    def w(src, sym, word, dst):
        states.update((src, dst))
        rules.append(WriteRule(src, sym, word, dst))

    # variable list: copy a code, append the guessed bit on '#', insert
    for d in "01":
        w("L", d, (d,), "Lcopy")
        w("Lcopy", d, (d,), "Lcopy")
    for bit in "01":
        w("Lcopy", "#", (bit,), f"Lpend{bit}")
        states.add(f"Lpend{bit}")
        rules.append(InRule(f"Lpend{bit}", None, "L"))
    w("L", "#", (), "phi")

    # clauses: (lit,lit,lit) with exactly one literal checked per clause
    def lit_states(pos: int, done: bool):
        tag = f"{pos}{int(done)}"
        entry = f"lit{tag}"
        states.add(entry)
        delim, cont = (",", f"lit{pos+1}1") if pos < 2 else (")", "phi")
        if not done:
            # choice: check this literal
            for sign in "+-":
                w(entry, sign, (), f"copy{tag}{sign}")
                for d in "01":
                    w(f"copy{tag}{sign}", d, (d,), f"copy{tag}{sign}")
                if sign == "+":
                    # positive literal: (x,1) must be present
                    w(f"copy{tag}{sign}", delim, ("1",), f"tp|{tag}")
                    states.add(f"tp|{tag}")
                    rules.append(TestRule(f"tp|{tag}", None, cont, "dead"))
                else:
                    # negative literal: (x,0) present, or (x,1) absent
                    w(f"copy{tag}{sign}", delim, ("0",), f"tz|{tag}")
                    states.add(f"tz|{tag}")
                    rules.append(TestRule(f"tz|{tag}", None, cont, "dead"))
                    w(f"copy{tag}{sign}", delim, ("1",), f"to|{tag}")
                    states.add(f"to|{tag}")
                    rules.append(TestRule(f"to|{tag}", None, "dead", cont))
        # choice: skip this literal (no writes)
        for sign in "+-":
            w(entry, sign, (), f"skip{tag}")
        for d in "01":
            w(f"skip{tag}", d, (), f"skip{tag}")
        if pos < 2:
            w(f"skip{tag}", ",", (), f"lit{pos+1}{int(done)}")
        elif done:
            w(f"skip{tag}", ")", (), "phi")

    w("phi", "(", (), "lit00")
    for pos in range(3):
        for done in (False, True):
            lit_states(pos, done)
    states.add("dead")
    return SetAutomaton(
        states=states,
        input_alphabet=SASAT_ALPHABET,
        work_alphabet=("0", "1"),
        uses_endmarker=False,
        transitions=rules,
        initial="L",
        accepting={"phi"},
    )


# ---------------------------------------------------------------------------
# Turing machine simulation on a unary work alphabet


@dataclass(frozen=True)
class TmDescription:
    """Two-symbol Turing machine: delta maps (read symbol, state) to
    (written symbol, state, move); accepting states have no outgoing lines."""

    states: tuple[str, ...]
    initial: str
    accepting: frozenset[str]
    delta: tuple[tuple[tuple[int, str], tuple[int, str, int]], ...]

    def table(self) -> dict[tuple[int, str], tuple[int, str, int]]:
        return dict(self.delta)


def parse_tm(text: str) -> TmDescription:
    """Header lines `states`, `initial`, `accept`; one `delta STATE READ ->
    WRITE STATE MOVE` line per (symbol, state), MOVE in {L, R, S}."""
    states: tuple[str, ...] = ()
    initial = None
    accepting: set[str] = set()
    delta = []
    moves = {"L": -1, "S": 0, "R": 1}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";")[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "states":
            states = tuple(toks[1:])
        elif toks[0] == "initial":
            initial = toks[1]
        elif toks[0] == "accept":
            accepting.update(toks[1:])
        elif toks[0] == "delta":
            if len(toks) != 7 or toks[3] != "->" or toks[6] not in moves:
                raise ValueError(f"line {lineno}: bad delta line")
            q, read, wr, q2 = toks[1], int(toks[2]), int(toks[4]), toks[5]
            delta.append(((read, q), (wr, q2, moves[toks[6]])))
        else:
            raise ValueError(f"line {lineno}: unknown directive {toks[0]!r}")
    if initial is None:
        raise ValueError("missing initial state")
    return TmDescription(states, initial, frozenset(accepting), tuple(delta))


def tm_accepts(tm: TmDescription, cells: int, max_steps: int = 10**6) -> bool:
    """Direct simulator on `cells` blank tape cells, head starting in the
    middle; rejects on leaving the tape, halting in a non-accepting state,
    or repeating a configuration."""
    table = tm.table()
    tape = [0] * cells
    head = cells // 2
    state = tm.initial
    seen = set()
    for _ in range(max_steps):
        if state in tm.accepting:
            return True
        key = (state, head, tuple(tape))
        if key in seen:
            return False
        seen.add(key)
        line = table.get((tape[head], state))
        if line is None:
            return False
        wr, state, move = line
        tape[head] = wr
        head += move
        if not 0 <= head < cells:
            return False
    return False


def tm_to_unary_dsa(tm: TmDescription, n: int) -> SetAutomaton:
    """Deterministic machine with a unary work alphabet and only empty moves
    that accepts the empty word exactly when the Turing machine accepts on 2n
    blank cells (head starting at cell n).

    Cell i holds 1 exactly when the unary word of length i is in the set.  A
    simulation step writes the head position one mark at a time, inserts or
    removes it per the written symbol, moves, writes the new position and
    tests it to learn the symbol under the head; the head position, the
    transition line and the write counter live in the state.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cells = 2 * n
    mark = "m"  # '#' is the protocol delimiter, so the unary mark is a plain letter
    table = tm.table()
    rules: list[TransitionRule] = []
    states = set()

    def start_name(k, a, q):
        return f"st|{k}|{a}|{q}"

    def add(rule):
        rules.append(rule)
        states.add(rule.src)
        states.update((rule.dst_plus, rule.dst_minus) if isinstance(rule, TestRule)
                      else (rule.dst,))

    for k in range(1, cells + 1):
        for a in (0, 1):
            for q in tm.states:
                start = start_name(k, a, q)
                states.add(start)
                line = table.get((a, q))
                if line is None:
                    continue  # halting line: accepting states end the run
                a2, q2, d = line
                k2 = k + d
                if not 1 <= k2 <= cells:
                    continue  # the head would leave the allotted tape
                # write k marks, one per move
                prev = start
                for j in range(1, k + 1):
                    nxt = f"w1|{k}|{a}|{q}|{j}"
                    add(WriteRule(prev, None, (mark,), nxt))
                    prev = nxt
                # update the cell: written 1 inserts, written 0 removes
                upd = f"upd|{k}|{a}|{q}"
                add((InRule if a2 == 1 else OutRule)(prev, None, upd))
                # write the new head position and test it
                prev = upd
                for j in range(1, k2 + 1):
                    nxt = f"w2|{k}|{a}|{q}|{j}"
                    add(WriteRule(prev, None, (mark,), nxt))
                    prev = nxt
                add(TestRule(prev, None, start_name(k2, 1, q2), start_name(k2, 0, q2)))

    initial = start_name(n, 0, tm.initial)
    states.add(initial)
    accepting = {start_name(k, a, q) for k in range(1, cells + 1)
                 for a in (0, 1) for q in tm.accepting}
    states |= accepting
    return SetAutomaton(
        states=states,
        input_alphabet=("a",),
        work_alphabet=(mark,),
        uses_endmarker=False,
        transitions=rules,
        initial=initial,
        accepting=accepting,
    )


# ---------------------------------------------------------------------------
# membership reduced to emptiness


def membership_to_emptiness(sa: SetAutomaton, w: Word) -> SetAutomaton:
    """Deterministic machine recognizing {w} minus the machine's language.

    The input is matched against w position by position while the (loop-free)
    machine runs alongside; after the last symbol the residual empty-move
    chain is followed with a flag recording whether an accepting state was
    seen, and the machine accepts exactly when it was not.
    """
    if not sa.is_deterministic():
        raise NotDeterministic("membership_to_emptiness requires a deterministic machine")
    d = remove_eps_loops(sa)
    ew = w + ((END,) if d.uses_endmarker else ())
    n = len(ew)
    eps: dict[str, TransitionRule] = {r.src: r for r in d.transitions if r.sym is None}
    by_key = {(r.src, r.sym): r for r in d.transitions}

    def name(s, i, f):
        return f"[{s}|{i}|{int(f)}]"

    SKIP = "!skip"  # the machine got stuck: keep matching w, no acceptance seen
    rules: list[TransitionRule] = []
    states = set()
    start_flag = n == 0 and d.initial in d.accepting
    seen = {(d.initial, 0, start_flag)}
    queue = [(d.initial, 0, start_flag)]
    while queue:
        s, i, f = queue.pop()
        states.add(name(s, i, f))
        if s == SKIP:
            if i < n:
                rules.append(WriteRule(name(s, i, f), ew[i], (), name(SKIP, i + 1, f)))
                if (SKIP, i + 1, f) not in seen:
                    seen.add((SKIP, i + 1, f))
                    queue.append((SKIP, i + 1, f))
            continue
        moves = []
        r = eps.get(s)
        if r is not None:
            moves.append((None, r))
        elif i < n:
            hit = by_key.get((s, ew[i]))
            if hit is not None:
                moves.append((ew[i], hit))
            else:
                rules.append(WriteRule(name(s, i, f), ew[i], (), name(SKIP, i + 1, f)))
                if (SKIP, i + 1, f) not in seen:
                    seen.add((SKIP, i + 1, f))
                    queue.append((SKIP, i + 1, f))
        for sym, rule in moves:
            i2 = i if sym is None else i + 1
            targets = (rule.dst_plus, rule.dst_minus) if isinstance(rule, TestRule) else (rule.dst,)
            named = []
            for t in targets:
                f2 = f or (i2 == n and t in d.accepting)
                named.append(name(t, i2, f2))
                if (t, i2, f2) not in seen:
                    seen.add((t, i2, f2))
                    queue.append((t, i2, f2))
            if isinstance(rule, WriteRule):
                rules.append(WriteRule(name(s, i, f), sym, rule.word, named[0]))
            elif isinstance(rule, InRule):
                rules.append(InRule(name(s, i, f), sym, named[0]))
            elif isinstance(rule, OutRule):
                rules.append(OutRule(name(s, i, f), sym, named[0]))
            else:
                rules.append(TestRule(name(s, i, f), sym, named[0], named[1]))
    accepting = set()
    for s, i, f in seen:
        if i == n and not f and eps.get(s) is None:
            accepting.add(name(s, i, f))
    states |= {name(*t) for t in seen}
    return SetAutomaton(states, sa.input_alphabet, sa.work_alphabet, d.uses_endmarker,
                        sorted(rules, key=repr), name(d.initial, 0, start_flag), accepting)
