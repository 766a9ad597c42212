"""Rational-cone machinery around the correct-protocol language.

build_extractor turns a normalized machine M into a transducer whose outputs
on input w are exactly the candidate protocols of M's runs on w, so that w is
accepted iff some output is a correct protocol.  cone_generate goes the other
way: it composes a transducer with the protocol-recognizing machine, yielding
a set automaton for the words whose image meets the correct protocols.
"""

from __future__ import annotations

from functools import lru_cache

from .automata import Fst, FstRule, Word, fst_apply
from .core import HASH, InRule, OutRule, SetAutomaton, TestRule, WriteRule
from .normalform import is_normalized, normalize_requirements
from .protocol import build_mprot, protocol_alphabet


class NotNormalized(ValueError):
    pass


def build_extractor(sa: SetAutomaton) -> Fst:
    """Protocol extractor of a normalized machine.

    The transducer mirrors the machine: writes are copied to the output,
    queries emit `#op#` with test outcomes guessed.  A second, final layer of
    the state space carries the guess that the current query is the run's
    last one; there the trailing delimiter is omitted and only accepting
    machine states accept, so every accepted output is a well-formed protocol
    (no trailing '#') and outputs of accepted inputs end at the final query.
    """
    if not is_normalized(sa):
        raise NotNormalized(
            "extractor needs work alphabet {a,b}, no endmarker, acceptance only after an operation")
    gamma = sa.work_alphabet
    sigma = sa.input_alphabet
    out_alpha = protocol_alphabet(gamma)
    live = lambda s: f"{s}^"
    last = lambda s: f"{s}$"
    start = "extract0"
    rules = [FstRule(start, (), (HASH,), live(sa.initial))]
    for r in sa.transitions:
        read = () if r.sym is None else (r.sym,)
        if isinstance(r, WriteRule):
            rules.append(FstRule(live(r.src), read, r.word, live(r.dst)))
        elif isinstance(r, (InRule, OutRule)):
            op = "in" if isinstance(r, InRule) else "out"
            rules.append(FstRule(live(r.src), read, (HASH, op, HASH), live(r.dst)))
            rules.append(FstRule(live(r.src), read, (HASH, op), last(r.dst)))
        else:
            for op, dst in (("test+", r.dst_plus), ("test-", r.dst_minus)):
                rules.append(FstRule(live(r.src), read, (HASH, op, HASH), live(dst)))
                rules.append(FstRule(live(r.src), read, (HASH, op), last(dst)))
    states = {start} | {live(s) for s in sa.states} | {last(s) for s in sa.states}
    accepting = {last(f) for f in sa.accepting}
    return Fst(states, sigma, out_alpha, rules, start, accepting)


@lru_cache(maxsize=64)
def _normalized_extractor(sa: SetAutomaton) -> Fst:
    m = sa if is_normalized(sa) else normalize_requirements(sa)
    return build_extractor(m)


def member_via_protocols(sa: SetAutomaton, w: Word) -> bool:
    """Exact membership decision, valid even with empty-move loops.

    Normalizes the machine, applies its extractor to w, and decides whether
    the output language contains a correct protocol.
    """
    from .emptiness import nrr_decide

    candidates = fst_apply(_normalized_extractor(sa), w)
    return nrr_decide(candidates).nonempty


def cone_generate(t: Fst) -> SetAutomaton:
    """Set automaton for the words whose image under t meets the correct protocols.

    The inverse-direction pairing of t with the protocol machine: t reads the
    automaton's input, and each emitted protocol symbol drives one step of
    the protocol machine through intermediate product states (one real set
    operation per step, so multi-symbol outputs become short chains).
    """
    mprot = build_mprot(_gamma_of(t.output_alphabet))
    prot_rules = {(r.src, r.sym): r for r in mprot.transitions}

    def pname(s, p):
        return f"({s},{p})"

    states: set[str] = set()
    rules: list = []
    fresh = [0]
    seen = {(t.initial, mprot.initial)}
    queue = [(t.initial, mprot.initial)]

    def pair_state(s, p) -> str:
        if (s, p) not in seen:
            seen.add((s, p))
            queue.append((s, p))
        return pname(s, p)

    def mid() -> str:
        fresh[0] += 1
        n = f"mid{fresh[0]}"
        states.add(n)
        return n

    def emit(cur: str, sym, p: str, symbols: Word, t_dst: str):
        """One composed transition step: feed symbols through the protocol
        machine from state p, consuming sym on the first step only."""
        if not symbols:
            rules.append(WriteRule(cur, sym, (), pair_state(t_dst, p)))
            return
        head, rest = symbols[0], symbols[1:]
        pr = prot_rules.get((p, head))
        if pr is None:
            return  # output unreadable by the protocol machine: this branch dies
        if isinstance(pr, TestRule):
            landings = []
            for dst in (pr.dst_plus, pr.dst_minus):
                landings.append(pair_state(t_dst, dst) if not rest else (mid(), dst))
            plus, minus = (x if isinstance(x, str) else x[0] for x in landings)
            rules.append(TestRule(cur, sym, plus, minus))
            for landing in landings:
                if not isinstance(landing, str):
                    emit(landing[0], None, landing[1], rest, t_dst)
            return
        nxt = pair_state(t_dst, pr.dst) if not rest else mid()
        if isinstance(pr, WriteRule):
            rules.append(WriteRule(cur, sym, pr.word, nxt))
        elif isinstance(pr, InRule):
            rules.append(InRule(cur, sym, nxt))
        else:
            rules.append(OutRule(cur, sym, nxt))
        if rest:
            emit(nxt, None, pr.dst, rest, t_dst)

    by_src: dict[str, list[FstRule]] = {s: [] for s in t.states}
    for r in sorted(t.transitions, key=repr):
        by_src[r.src].append(r)
    while queue:
        s, p = queue.pop()
        states.add(pname(s, p))
        for r in by_src[s]:
            emit(pname(s, p), r.read[0] if r.read else None, p, r.write, r.dst)

    accepting = {pname(s, p) for s, p in seen
                 if s in t.accepting and p in mprot.accepting}
    states |= {pname(s, p) for s, p in seen}
    return SetAutomaton(states, t.input_alphabet, mprot.work_alphabet, False,
                        sorted(rules, key=repr), pname(t.initial, mprot.initial), accepting)


def _gamma_of(output_alphabet) -> tuple[str, ...]:
    reserved = {HASH, "in", "out", "test+", "test-"}
    return tuple(s for s in output_alphabet if s not in reserved)
