"""Shared test oracles and instance generators.

The membership oracle here is deliberately independent of the library's
subset-construction path: it searches (state, position) pairs directly.
"""

from __future__ import annotations

import itertools
import random

from sakit.automata import Fst, FstRule, Nfa
from sakit.core import (END, InRule, OutRule, SetAutomaton, TestRule,
                        WriteRule)
from sakit.emptiness import QueryLanguageFamily, TypedProtocol
from sakit.protocol import Protocol, QueryBlock, protocol_alphabet


def accepts_naive(a: Nfa, word) -> bool:
    """Membership by plain search over (state, position) pairs."""
    seen = set()
    stack = [(s, 0) for s in a.initial]
    by_src = {}
    for src, label, dst in a.transitions:
        by_src.setdefault(src, []).append((label, dst))
    while stack:
        s, i = stack.pop()
        if (s, i) in seen:
            continue
        seen.add((s, i))
        if i == len(word) and s in a.accepting:
            return True
        for label, dst in by_src.get(s, ()):
            if label is None:
                stack.append((dst, i))
            elif i < len(word) and word[i] == label:
                stack.append((dst, i + 1))
    return False


def brute_language(a: Nfa, max_len: int) -> set:
    out = set()
    for n in range(max_len + 1):
        for w in itertools.product(a.alphabet, repeat=n):
            if accepts_naive(a, w):
                out.add(w)
    return out


def words_upto(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


# ---------------------------------------------------------------------------
# random machines


def random_nfa(rng: random.Random, max_states=3, alphabet=("a", "b"), eps=True):
    states = [f"q{i}" for i in range(rng.randint(1, max_states))]
    labels = list(alphabet) + ([None] if eps else [])
    trans = {(rng.choice(states), rng.choice(labels), rng.choice(states))
             for _ in range(rng.randint(0, 3 * len(states)))}
    initial = {rng.choice(states)}
    accepting = {rng.choice(states) for _ in range(rng.randint(0, len(states)))}
    return Nfa(states, alphabet, trans, initial, accepting)


def random_protocol_nfa(rng: random.Random, gamma=("a", "b"), max_states=3):
    """Random automaton over the protocol alphabet, biased toward the
    delimiter so that protocol-shaped paths actually occur."""
    pa = protocol_alphabet(gamma)
    states = [f"q{i}" for i in range(rng.randint(1, max_states))]
    weights = {"#": 6, "a": 3, "b": 2, "in": 2, "out": 1, "test+": 2, "test-": 2}
    syms = [s for s, k in weights.items() for _ in range(k)]
    trans = {(rng.choice(states), rng.choice(syms), rng.choice(states))
             for _ in range(rng.randint(2, 10))}
    return Nfa(states, pa, trans, {rng.choice(states)}, {rng.choice(states)})


def random_fst(rng: random.Random, alphabet=("a", "b")):
    states = [f"s{i}" for i in range(rng.randint(1, 3))]
    rules = []
    for _ in range(rng.randint(1, 6)):
        read = rng.choice([(), ("a",), ("b",)])
        write = tuple(rng.choice(["", "a", "b", "ab", "ba"]))
        rules.append(FstRule(rng.choice(states), read, write, rng.choice(states)))
    return Fst.build(states, alphabet, alphabet, rules, states[0],
                     {rng.choice(states) for _ in range(rng.randint(1, len(states)))})


def random_family(rng: random.Random, max_n=3, gamma=("a", "b")) -> QueryLanguageFamily:
    from sakit.automata import nfa_emptiness

    while True:
        langs = []
        for _ in range(rng.randint(1, max_n)):
            a = random_nfa(rng, alphabet=gamma, eps=False)
            if not nfa_emptiness(a):
                langs.append(a)
        if langs:
            return QueryLanguageFamily(langs, gamma)


def random_correct_typed(rng: random.Random, fam: QueryLanguageFamily,
                         max_blocks=8) -> TypedProtocol:
    """Correct-by-construction: operations applied to a live set simulation,
    words drawn from their assigned query language."""
    from sakit.automata import iter_words

    choices = {}
    for i in range(1, len(fam) + 1):
        ws = []
        for w in iter_words(fam.language(i)):
            ws.append(w)
            if len(ws) >= 6:
                break
        choices[i] = ws
    blocks, types = [], []
    content = set()
    for pos in range(rng.randint(1, max_blocks)):
        i = rng.randint(1, len(fam))
        u = rng.choice(choices[i])
        op = rng.choice(["in", "out", "test"])
        if op == "test":
            op = "test+" if u in content else "test-"
        elif op == "in":
            content.add(u)
        else:
            content.discard(u)
        blocks.append(QueryBlock(u, op, pos))
        types.append(i)
    return TypedProtocol(Protocol(tuple(blocks), fam.gamma), tuple(types))


# ---------------------------------------------------------------------------
# intersection with a regular filter (used to build emptiness instances)


def prefix_filter_dfa(prefix, alphabet):
    """Complete DFA for the words starting with the given prefix."""
    n = len(prefix)
    delta = {}
    for i in range(n):
        for sym in alphabet:
            delta[(i, sym)] = i + 1 if sym == prefix[i] else -1
    for sym in alphabet:
        delta[(n, sym)] = n
        delta[(-1, sym)] = -1
    return {"init": 0, "finals": {n}, "delta": delta}


def no_symbol_filter_dfa(banned, alphabet):
    """Complete DFA for the words avoiding a symbol."""
    delta = {}
    for sym in alphabet:
        delta[(0, sym)] = -1 if sym == banned else 0
        delta[(-1, sym)] = -1
    return {"init": 0, "finals": {0}, "delta": delta}


def sa_intersect_regular(sa: SetAutomaton, dfa) -> SetAutomaton:
    """Product with a complete DFA over the input alphabet; empty moves and
    the endmarker leave the filter state unchanged."""
    init, finals, delta = dfa["init"], dfa["finals"], dfa["delta"]
    dstates = {init} | {d for (d, _) in delta} | set(delta.values())

    def name(s, d):
        return f"<{s}*{d}>"

    rules = []
    for r in sa.transitions:
        for d in dstates:
            d2 = d if r.sym is None or r.sym == END else delta[(d, r.sym)]
            if isinstance(r, WriteRule):
                rules.append(WriteRule(name(r.src, d), r.sym, r.word, name(r.dst, d2)))
            elif isinstance(r, InRule):
                rules.append(InRule(name(r.src, d), r.sym, name(r.dst, d2)))
            elif isinstance(r, OutRule):
                rules.append(OutRule(name(r.src, d), r.sym, name(r.dst, d2)))
            else:
                rules.append(TestRule(name(r.src, d), r.sym,
                                      name(r.dst_plus, d2), name(r.dst_minus, d2)))
    states = {name(s, d) for s in sa.states for d in dstates}
    accepting = {name(f, d) for f in sa.accepting for d in finals}
    return SetAutomaton(states, sa.input_alphabet, sa.work_alphabet,
                        sa.uses_endmarker, rules, name(sa.initial, init), accepting)
