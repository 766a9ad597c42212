"""The set-automaton model: one-way finite control plus a set of work-tape words.

A machine writes on the work tape and may, on a transition, insert the tape
word into the set, remove it, or test it for membership (branching on the
outcome); every such operation erases the tape.  Acceptance means reaching an
accepting state with the whole input (endmarker included, when used) consumed.

A deterministic machine that halts with unread input rejects; that completion
is ours, chosen for the runner, and is asserted nowhere else.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .automata import Word, tokenize

END = "<end>"          # internal right-endmarker symbol
HASH = "#"
OPS = ("in", "out", "test+", "test-")
RESERVED_WORK = frozenset((HASH, END) + OPS)


class NotDeterministic(ValueError):
    pass


class RuleNotEnabled(ValueError):
    pass


@dataclass(frozen=True)
class WriteRule:
    src: str
    sym: Optional[str]   # None for the empty move, END for the endmarker
    word: Word
    dst: str


@dataclass(frozen=True)
class InRule:
    src: str
    sym: Optional[str]
    dst: str


@dataclass(frozen=True)
class OutRule:
    src: str
    sym: Optional[str]
    dst: str


@dataclass(frozen=True)
class TestRule:
    __test__ = False  # not a pytest class

    src: str
    sym: Optional[str]
    dst_plus: str
    dst_minus: str


TransitionRule = Union[WriteRule, InRule, OutRule, TestRule]


def rule_targets(rule: TransitionRule) -> tuple[str, ...]:
    if isinstance(rule, TestRule):
        return (rule.dst_plus, rule.dst_minus)
    return (rule.dst,)


@dataclass(frozen=True)
class SetAutomaton:
    states: frozenset[str]
    input_alphabet: tuple[str, ...]
    work_alphabet: tuple[str, ...]
    uses_endmarker: bool
    transitions: tuple[TransitionRule, ...]
    initial: str
    accepting: frozenset[str]

    def __init__(self, states, input_alphabet, work_alphabet, uses_endmarker,
                 transitions, initial, accepting):
        object.__setattr__(self, "states", frozenset(states))
        object.__setattr__(self, "input_alphabet", tuple(dict.fromkeys(input_alphabet)))
        object.__setattr__(self, "work_alphabet", tuple(dict.fromkeys(work_alphabet)))
        object.__setattr__(self, "uses_endmarker", bool(uses_endmarker))
        object.__setattr__(self, "transitions", tuple(transitions))
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "accepting", frozenset(accepting))
        self._validate()

    def _validate(self):
        bad = RESERVED_WORK & set(self.work_alphabet)
        if bad:
            raise ValueError(f"work alphabet uses reserved symbols: {sorted(bad)}")
        if END in self.input_alphabet:
            raise ValueError("endmarker symbol cannot be a declared input symbol")
        inp = set(self.input_alphabet)
        work = set(self.work_alphabet)
        if self.initial not in self.states or not self.accepting <= self.states:
            raise ValueError("initial/accepting must be declared states")
        for r in self.transitions:
            if r.src not in self.states or any(t not in self.states for t in rule_targets(r)):
                raise ValueError(f"rule endpoint not a declared state: {r}")
            if r.sym is not None and r.sym != END and r.sym not in inp:
                raise ValueError(f"rule symbol {r.sym!r} not in input alphabet")
            if r.sym == END and not self.uses_endmarker:
                raise ValueError("endmarker rule on a machine that does not use the endmarker")
            if isinstance(r, WriteRule) and any(s not in work for s in r.word):
                raise ValueError(f"write word outside work alphabet: {r}")

    def is_deterministic(self) -> bool:
        """One rule per (state, symbol); an empty-move rule excludes all others."""
        seen = set()
        eps_states = set()
        for r in self.transitions:
            key = (r.src, r.sym)
            if key in seen:
                return False
            seen.add(key)
            if r.sym is None:
                eps_states.add(r.src)
        return all(src not in eps_states or sym is None for src, sym in seen)

    def rules_from(self, state: str) -> list[TransitionRule]:
        return [r for r in self.transitions if r.src == state]

    def tokenize(self, text: str) -> Word:
        return tokenize(text, self.input_alphabet)


@dataclass(frozen=True)
class Configuration:
    """state, unread input (endmarker included when used), work tape, set content."""

    state: str
    remaining: Word
    tape: Word
    content: frozenset[Word]


def initial_configuration(sa: SetAutomaton, w: Word) -> Configuration:
    if sa.uses_endmarker:
        w = w + (END,)
    return Configuration(sa.initial, w, (), frozenset())


def is_accepting_configuration(sa: SetAutomaton, c: Configuration) -> bool:
    return c.state in sa.accepting and not c.remaining


def rule_enabled(sa: SetAutomaton, c: Configuration, rule: TransitionRule) -> bool:
    if rule.src != c.state:
        return False
    if rule.sym is None:
        return True
    return bool(c.remaining) and c.remaining[0] == rule.sym


def step(sa: SetAutomaton, c: Configuration, rule: TransitionRule) -> Configuration:
    """Apply one enabled rule; raises RuleNotEnabled otherwise."""
    if not rule_enabled(sa, c, rule):
        raise RuleNotEnabled(f"rule {rule} not enabled in {c}")
    rest = c.remaining if rule.sym is None else c.remaining[1:]
    if isinstance(rule, WriteRule):
        return Configuration(rule.dst, rest, c.tape + rule.word, c.content)
    if isinstance(rule, InRule):
        return Configuration(rule.dst, rest, (), c.content | {c.tape})
    if isinstance(rule, OutRule):
        return Configuration(rule.dst, rest, (), c.content - {c.tape})
    if c.tape in c.content:
        return Configuration(rule.dst_plus, rest, (), c.content)
    return Configuration(rule.dst_minus, rest, (), c.content)


def _test_branch(c: Configuration) -> str:
    return "+" if c.tape in c.content else "-"


class RunVerdict(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    BUDGET_EXCEEDED = "budget-exceeded"


@dataclass(frozen=True)
class TraceStep:
    rule_index: int
    rule: TransitionRule
    branch: Optional[str]       # '+'/'-' for tests
    query_word: Optional[Word]  # tape content for in/out/test steps


@dataclass
class Trace:
    word: Word
    steps: list[TraceStep]
    accepted: bool
    final: Optional[Configuration]
    gamma: tuple[str, ...] = ()


@dataclass
class RunResult:
    verdict: RunVerdict
    trace: Trace
    steps_taken: int


DEFAULT_BUDGET = 10**6


def run_dsa(sa: SetAutomaton, w: Word, budget: int = DEFAULT_BUDGET) -> RunResult:
    """Simulate the unique run of a deterministic machine.

    Rejects when stuck, when input remains at a halt, or when a full
    configuration repeats (proven divergence).  Budget exhaustion is reported
    separately: it can only happen on tape-growing empty-move loops.
    """
    if not sa.is_deterministic():
        raise NotDeterministic("run_dsa requires a deterministic machine")
    by_key: dict[tuple[str, Optional[str]], tuple[int, TransitionRule]] = {}
    for i, r in enumerate(sa.transitions):
        by_key[(r.src, r.sym)] = (i, r)
    c = initial_configuration(sa, w)
    steps: list[TraceStep] = []
    seen = {c}
    n = 0
    while True:
        if is_accepting_configuration(sa, c):
            return RunResult(RunVerdict.ACCEPT, Trace(w, steps, True, c, sa.work_alphabet), n)
        hit = by_key.get((c.state, None))
        if hit is None and c.remaining:
            hit = by_key.get((c.state, c.remaining[0]))
        if hit is None:
            return RunResult(RunVerdict.REJECT, Trace(w, steps, False, c, sa.work_alphabet), n)
        if n >= budget:
            return RunResult(RunVerdict.BUDGET_EXCEEDED, Trace(w, steps, False, c, sa.work_alphabet), n)
        idx, rule = hit
        branch = _test_branch(c) if isinstance(rule, TestRule) else None
        query = c.tape if not isinstance(rule, WriteRule) else None
        nxt = step(sa, c, rule)
        steps.append(TraceStep(idx, rule, branch, query))
        n += 1
        if nxt in seen:
            return RunResult(RunVerdict.REJECT, Trace(w, steps, False, nxt, sa.work_alphabet), n)
        seen.add(nxt)
        c = nxt


RunCertificate = tuple[tuple[int, Optional[str]], ...]


@dataclass
class NsaSearchResult:
    found: bool
    certificate: Optional[RunCertificate]
    exhausted: bool   # True when the whole reachable space within budget was explored
    explored: int


def run_nsa_bounded(sa: SetAutomaton, w: Word, budget: int = 4096) -> NsaSearchResult:
    """Breadth-first search over runs of length <= budget.

    A found accepting run comes back as a replayable certificate of
    (rule index, test branch) pairs; `exhausted` reports whether the search
    space was fully explored below the budget (making a miss definitive).
    """
    indexed = list(enumerate(sa.transitions))
    by_state: dict[str, list[tuple[int, TransitionRule]]] = {s: [] for s in sa.states}
    for i, r in indexed:
        by_state[r.src].append((i, r))
    start = initial_configuration(sa, w)
    parent: dict[Configuration, tuple[Configuration, int, Optional[str]]] = {}
    depth = {start: 0}
    queue = deque([start])
    truncated = False
    explored = 0

    def certificate(c: Configuration) -> RunCertificate:
        rev = []
        while c in parent:
            c, idx, branch = parent[c]
            rev.append((idx, branch))
        return tuple(reversed(rev))

    if is_accepting_configuration(sa, start):
        return NsaSearchResult(True, (), True, 1)
    while queue:
        c = queue.popleft()
        explored += 1
        if depth[c] >= budget:
            if any(rule_enabled(sa, c, r) for _, r in by_state[c.state]):
                truncated = True
            continue
        for idx, rule in by_state[c.state]:
            if not rule_enabled(sa, c, rule):
                continue
            branch = _test_branch(c) if isinstance(rule, TestRule) else None
            nxt = step(sa, c, rule)
            if nxt in depth:
                continue
            depth[nxt] = depth[c] + 1
            parent[nxt] = (c, idx, branch)
            if is_accepting_configuration(sa, nxt):
                return NsaSearchResult(True, certificate(nxt), False, explored)
            queue.append(nxt)
    return NsaSearchResult(False, None, not truncated, explored)


def verify_certificate(sa: SetAutomaton, w: Word, cert: Iterable[tuple[int, Optional[str]]]) -> bool:
    """Replay a certificate from the initial configuration; linear in its size.

    True iff every rule is enabled in turn, recorded test branches match, the
    input is fully consumed and the final state accepts.  Ill-formed
    certificates simply yield False.
    """
    c = initial_configuration(sa, w)
    for entry in cert:
        try:
            idx, branch = entry
            rule = sa.transitions[idx]
        except (TypeError, ValueError, IndexError):
            return False
        if not rule_enabled(sa, c, rule):
            return False
        if isinstance(rule, TestRule):
            if branch != _test_branch(c):
                return False
        elif branch is not None:
            return False
        c = step(sa, c, rule)
    return is_accepting_configuration(sa, c)


def trace_from_certificate(sa: SetAutomaton, w: Word, cert: RunCertificate) -> Trace:
    """Turn a valid certificate into a trace (for protocol extraction)."""
    c = initial_configuration(sa, w)
    steps = []
    for idx, branch in cert:
        rule = sa.transitions[idx]
        query = c.tape if not isinstance(rule, WriteRule) else None
        steps.append(TraceStep(idx, rule, branch, query))
        c = step(sa, c, rule)
    return Trace(w, steps, is_accepting_configuration(sa, c), c, sa.work_alphabet)


def extract_run_protocol(trace: Trace):
    """Protocol of an accepting run: the (query word, operation) sequence in order."""
    from .protocol import Protocol, QueryBlock

    if not trace.accepted:
        raise ValueError("protocol extraction requires an accepting trace")
    blocks = []
    for ts in trace.steps:
        if isinstance(ts.rule, WriteRule):
            continue
        if isinstance(ts.rule, InRule):
            op = "in"
        elif isinstance(ts.rule, OutRule):
            op = "out"
        else:
            op = "test+" if ts.branch == "+" else "test-"
        blocks.append(QueryBlock(ts.query_word, op, len(blocks)))
    return Protocol(tuple(blocks), trace.gamma)
