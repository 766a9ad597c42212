"""Finite automata and transducers: the algebra everything else is built on.

Words are tuples of symbols; a symbol is a non-empty string (multi-character
symbols such as operation tokens are ordinary symbols).  Alphabets are ordered
tuples -- the declared order is the total symbol order used by every
length-lexicographic enumeration, so witnesses are reproducible.

All values are immutable after construction and every operation is a pure
function; concurrent use needs no synchronization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional

Word = tuple[str, ...]

EPSILON: Optional[str] = None  # transition label for the empty move


class AlphabetMismatch(ValueError):
    pass


def word_key(word: Word, order: tuple[str, ...]):
    """Length-lexicographic sort key under the declared symbol order."""
    pos = {sym: i for i, sym in enumerate(order)}
    return (len(word), tuple(pos[s] for s in word))


def tokenize(text: str, alphabet: Iterable[str]) -> Word:
    """Split a string into alphabet symbols, preferring the longest match.

    Exact: fails with ValueError iff no segmentation into declared symbols
    exists (a dynamic program checks suffix feasibility first).
    """
    syms = sorted(set(alphabet), key=len, reverse=True)
    n = len(text)
    ok = [False] * (n + 1)
    ok[n] = True
    for i in range(n - 1, -1, -1):
        ok[i] = any(text.startswith(s, i) and ok[i + len(s)] for s in syms)
    if not ok[0]:
        raise ValueError(f"cannot tokenize {text!r} over alphabet {sorted(set(alphabet))}")
    out = []
    i = 0
    while i < n:
        for s in syms:
            if text.startswith(s, i) and ok[i + len(s)]:
                out.append(s)
                i += len(s)
                break
    return tuple(out)


def format_word(word: Word) -> str:
    return "".join(word)


@dataclass(frozen=True)
class Nfa:
    """Nondeterministic finite automaton with optional empty-labelled moves.

    transitions hold (src, label, dst) triples; label None is the empty move.
    """

    states: frozenset[str]
    alphabet: tuple[str, ...]
    transitions: frozenset[tuple[str, Optional[str], str]]
    initial: frozenset[str]
    accepting: frozenset[str]

    def __init__(self, states, alphabet, transitions, initial, accepting):
        object.__setattr__(self, "states", frozenset(states))
        object.__setattr__(self, "alphabet", tuple(dict.fromkeys(alphabet)))
        object.__setattr__(self, "transitions", frozenset(transitions))
        object.__setattr__(self, "initial", frozenset(initial))
        object.__setattr__(self, "accepting", frozenset(accepting))
        self._validate()

    def _validate(self):
        declared = set(self.alphabet)
        for src, label, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError(f"transition endpoint not a declared state: {(src, label, dst)}")
            if label is not None and label not in declared:
                raise ValueError(f"transition label {label!r} not in alphabet")
        if not self.initial <= self.states or not self.accepting <= self.states:
            raise ValueError("initial/accepting must be subsets of states")

    def tokenize(self, text: str) -> Word:
        return tokenize(text, self.alphabet)


def empty_nfa(alphabet: Iterable[str]) -> Nfa:
    return Nfa({"q0"}, alphabet, set(), {"q0"}, set())


def word_automaton(word: Word, alphabet: Iterable[str]) -> Nfa:
    """Automaton recognizing exactly {word}."""
    states = {f"w{i}" for i in range(len(word) + 1)}
    trans = {(f"w{i}", sym, f"w{i+1}") for i, sym in enumerate(word)}
    return Nfa(states, alphabet, trans, {"w0"}, {f"w{len(word)}"})


def finite_language_nfa(words: Iterable[Word], alphabet: Iterable[str]) -> Nfa:
    """Trie automaton for a finite set of words."""
    alphabet = tuple(dict.fromkeys(alphabet))
    words = sorted(set(words))
    states = {"r"}
    accepting = set()
    trans = set()
    for w in words:
        cur = "r"
        for i, sym in enumerate(w):
            nxt = "r" + "".join("." + s for s in w[: i + 1])
            states.add(nxt)
            trans.add((cur, sym, nxt))
            cur = nxt
        accepting.add(cur)
    return Nfa(states, alphabet, trans, {"r"}, accepting)


def _eps_succ(a: Nfa) -> dict[str, set[str]]:
    succ: dict[str, set[str]] = {s: set() for s in a.states}
    for src, label, dst in a.transitions:
        if label is None:
            succ[src].add(dst)
    return succ


def eps_closure(a: Nfa, states: Iterable[str]) -> frozenset[str]:
    succ = _eps_succ(a)
    seen = set(states)
    stack = list(seen)
    while stack:
        for t in succ[stack.pop()]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)


def nfa_accepts(a: Nfa, word: Word) -> bool:
    cur = eps_closure(a, a.initial)
    by_label: dict[tuple[str, str], set[str]] = {}
    for src, label, dst in a.transitions:
        if label is not None:
            by_label.setdefault((src, label), set()).add(dst)
    for sym in word:
        nxt = set()
        for s in cur:
            nxt |= by_label.get((s, sym), set())
        if not nxt:
            return False
        cur = eps_closure(a, nxt)
    return bool(cur & a.accepting)


def remove_eps(a: Nfa) -> Nfa:
    """Equivalent automaton with no empty-labelled transitions."""
    if all(label is not None for _, label, _ in a.transitions):
        return a
    close = {s: eps_closure(a, {s}) for s in a.states}
    trans = set()
    for src, label, dst in a.transitions:
        if label is None:
            continue
        for s in a.states:
            if src in close[s]:
                trans.add((s, label, dst))
    accepting = {s for s in a.states if close[s] & a.accepting}
    return Nfa(a.states, a.alphabet, trans, a.initial, accepting)


def trim(a: Nfa) -> Nfa:
    """Restrict to states both reachable and co-reachable."""
    fwd: dict[str, set[str]] = {s: set() for s in a.states}
    bwd: dict[str, set[str]] = {s: set() for s in a.states}
    for src, _, dst in a.transitions:
        fwd[src].add(dst)
        bwd[dst].add(src)

    def reach(seed, adj):
        seen = set(seed)
        stack = list(seed)
        while stack:
            for t in adj[stack.pop()]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen

    useful = reach(a.initial, fwd) & reach(a.accepting, bwd)
    if not useful:
        return empty_nfa(a.alphabet)
    trans = {(s, x, d) for s, x, d in a.transitions if s in useful and d in useful}
    return Nfa(useful, a.alphabet, trans, a.initial & useful, a.accepting & useful)


def _set_name(states: frozenset[str]) -> str:
    return "{" + "+".join(sorted(states)) + "}" if states else "{}"


@lru_cache(maxsize=None)
def determinize(a: Nfa) -> Nfa:
    """Subset construction (with empty-move closure); complete over the alphabet.

    Cached per automaton value; the result always has exactly one initial state.
    """
    by_label: dict[tuple[str, str], set[str]] = {}
    for src, label, dst in a.transitions:
        if label is not None:
            by_label.setdefault((src, label), set()).add(dst)
    start = eps_closure(a, a.initial)
    subsets = {start}
    trans = set()
    queue = [start]
    while queue:
        cur = queue.pop()
        for sym in a.alphabet:
            nxt = set()
            for s in cur:
                nxt |= by_label.get((s, sym), set())
            nxt = eps_closure(a, nxt)
            trans.add((_set_name(cur), sym, _set_name(nxt)))
            if nxt not in subsets:
                subsets.add(nxt)
                queue.append(nxt)
    states = {_set_name(s) for s in subsets}
    accepting = {_set_name(s) for s in subsets if s & a.accepting}
    return Nfa(states, a.alphabet, trans, {_set_name(start)}, accepting)


def nfa_product(a: Nfa, b: Nfa) -> Nfa:
    """Automaton for the intersection of the two languages.

    Builds the reachable part of the pair space; empty moves advance one side.
    """
    if set(a.alphabet) != set(b.alphabet):
        raise AlphabetMismatch(f"alphabets differ: {a.alphabet} vs {b.alphabet}")
    a_by: dict[str, list[tuple[Optional[str], str]]] = {s: [] for s in a.states}
    b_by: dict[str, list[tuple[Optional[str], str]]] = {s: [] for s in b.states}
    for src, label, dst in a.transitions:
        a_by[src].append((label, dst))
    for src, label, dst in b.transitions:
        b_by[src].append((label, dst))

    def name(p, q):
        return f"({p},{q})"

    initial = {(p, q) for p in a.initial for q in b.initial}
    seen = set(initial)
    queue = list(initial)
    trans = set()
    while queue:
        p, q = queue.pop()
        moves = []
        for label, p2 in a_by[p]:
            if label is None:
                moves.append((None, p2, q))
            else:
                for lb, q2 in b_by[q]:
                    if lb == label:
                        moves.append((label, p2, q2))
        for lb, q2 in b_by[q]:
            if lb is None:
                moves.append((None, p, q2))
        for label, p2, q2 in moves:
            trans.add((name(p, q), label, name(p2, q2)))
            if (p2, q2) not in seen:
                seen.add((p2, q2))
                queue.append((p2, q2))
    states = {name(p, q) for p, q in seen}
    accepting = {name(p, q) for p, q in seen if p in a.accepting and q in b.accepting}
    return Nfa(states, a.alphabet, trans, {name(p, q) for p, q in initial}, accepting)


def nfa_complement(a: Nfa) -> Nfa:
    d = determinize(a)
    return Nfa(d.states, d.alphabet, d.transitions, d.initial, d.states - d.accepting)


def nfa_emptiness(a: Nfa) -> bool:
    """True iff the language is empty (no accepting state reachable)."""
    fwd: dict[str, set[str]] = {s: set() for s in a.states}
    for src, _, dst in a.transitions:
        fwd[src].add(dst)
    seen = set(a.initial)
    stack = list(seen)
    while stack:
        s = stack.pop()
        if s in a.accepting:
            return False
        for t in fwd[s]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return True


def _trimmed_dfa(a: Nfa) -> Nfa:
    return trim(determinize(a))


def _has_cycle(a: Nfa) -> bool:
    adj: dict[str, set[str]] = {s: set() for s in a.states}
    for src, _, dst in a.transitions:
        adj[src].add(dst)
    WHITE, GREY, BLACK = 0, 1, 2
    color = {s: WHITE for s in a.states}
    for root in a.states:
        if color[root] != WHITE:
            continue
        stack = [(root, iter(sorted(adj[root])))]
        color[root] = GREY
        while stack:
            node, it = stack[-1]
            adv = next(it, None)
            if adv is None:
                color[node] = BLACK
                stack.pop()
            elif color[adv] == GREY:
                return True
            elif color[adv] == WHITE:
                color[adv] = GREY
                stack.append((adv, iter(sorted(adj[adv]))))
    return False


def nfa_count_at_least(a: Nfa, k: int) -> bool:
    """True iff the language holds at least k words.

    On the trimmed deterministic automaton a cycle pumps infinitely many
    accepted words, so any cycle answers yes; otherwise the graph is acyclic
    and accepted words biject with paths, counted with saturation at k.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    d = _trimmed_dfa(a)
    if not d.accepting:
        return False
    if _has_cycle(d):
        return True
    # path count DP over the DAG, saturated at k
    adj: dict[str, list[str]] = {s: [] for s in d.states}
    indeg = {s: 0 for s in d.states}
    for src, _, dst in d.transitions:
        adj[src].append(dst)
        indeg[dst] += 1
    count = {s: 0 for s in d.states}
    for s in d.initial:
        count[s] = 1
    queue = [s for s in d.states if indeg[s] == 0]
    total = 0
    while queue:
        s = queue.pop()
        if s in d.accepting:
            total = min(k, total + count[s])
            if total >= k:
                return True
        for t in adj[s]:
            count[t] = min(k, count[t] + count[s])
            indeg[t] -= 1
            if indeg[t] == 0:
                queue.append(t)
    return total >= k


def iter_words(a: Nfa) -> Iterator[Word]:
    """Accepted words in length-lexicographic order (endless if the language is infinite)."""
    d = _trimmed_dfa(a)
    if not d.accepting:
        return
    succ: dict[tuple[str, str], str] = {}
    for src, label, dst in d.transitions:
        succ[(src, label)] = dst
    (start,) = d.initial
    level: list[tuple[Word, str]] = [((), start)]
    while level:
        nxt = []
        for word, s in level:
            if s in d.accepting:
                yield word
        for word, s in level:
            for sym in d.alphabet:
                t = succ.get((s, sym))
                if t is not None:
                    nxt.append((word + (sym,), t))
        level = nxt


def nfa_language(a: Nfa, max_len: int) -> set[Word]:
    """All accepted words up to max_len (via direct membership)."""
    out = set()
    for n in range(max_len + 1):
        for w in itertools.product(a.alphabet, repeat=n):
            if nfa_accepts(a, w):
                out.add(w)
    return out


# ---------------------------------------------------------------------------
# transducers


@dataclass(frozen=True)
class FstRule:
    src: str
    read: Word   # at most one symbol after normalization
    write: Word
    dst: str


@dataclass(frozen=True)
class Fst:
    """Finite-state transducer; each transition reads at most one symbol.

    Longer reads must go through the `build` factory, which splits them
    through fresh states; the plain constructor rejects them.
    """

    states: frozenset[str]
    input_alphabet: tuple[str, ...]
    output_alphabet: tuple[str, ...]
    transitions: frozenset[FstRule]
    initial: str
    accepting: frozenset[str]

    def __init__(self, states, input_alphabet, output_alphabet, transitions, initial, accepting):
        object.__setattr__(self, "states", frozenset(states))
        object.__setattr__(self, "input_alphabet", tuple(dict.fromkeys(input_alphabet)))
        object.__setattr__(self, "output_alphabet", tuple(dict.fromkeys(output_alphabet)))
        object.__setattr__(self, "transitions", frozenset(transitions))
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "accepting", frozenset(accepting))
        self._validate()

    def _validate(self):
        ia, oa = set(self.input_alphabet), set(self.output_alphabet)
        for r in self.transitions:
            if r.src not in self.states or r.dst not in self.states:
                raise ValueError(f"transducer rule endpoint not declared: {r}")
            if len(r.read) > 1:
                raise ValueError(f"transducer rule reads more than one symbol: {r}")
            if any(s not in ia for s in r.read):
                raise ValueError(f"read symbol outside input alphabet: {r}")
            if any(s not in oa for s in r.write):
                raise ValueError(f"write symbol outside output alphabet: {r}")
        if self.initial not in self.states or not self.accepting <= self.states:
            raise ValueError("initial/accepting must be declared states")

    @classmethod
    def build(cls, states, input_alphabet, output_alphabet, rules, initial, accepting) -> "Fst":
        """Factory splitting multi-symbol reads through fresh states."""
        states = set(states)
        out = []
        fresh = 0
        for r in rules:
            if len(r.read) <= 1:
                out.append(r)
                continue
            cur = r.src
            for i, sym in enumerate(r.read):
                last = i == len(r.read) - 1
                nxt = r.dst if last else f"{r.src}>{r.dst}%{fresh}.{i}"
                if not last:
                    states.add(nxt)
                out.append(FstRule(cur, (sym,), r.write if last else (), nxt))
                cur = nxt
            fresh += 1
        return cls(states, input_alphabet, output_alphabet, out, initial, accepting)


def _expand_write(trans: set, src: str, write: Word, dst: str, tag: str):
    """Add NFA transitions spelling `write` from src to dst through fresh states."""
    if not write:
        trans.add((src, None, dst))
        return
    cur = src
    for i, sym in enumerate(write):
        last = i == len(write) - 1
        nxt = dst if last else f"{src}~{dst}.{tag}.{i}"
        trans.add((cur, sym, nxt))
        cur = nxt


def fst_apply(t: Fst, w: Word) -> Nfa:
    """Automaton for the output language of t on the single input word w."""
    ia = set(t.input_alphabet)
    for sym in w:
        if sym not in ia:
            raise ValueError(f"input symbol {sym!r} outside transducer input alphabet")
    by_src: dict[str, list[FstRule]] = {s: [] for s in t.states}
    for r in sorted(t.transitions, key=repr):
        by_src[r.src].append(r)

    def name(s, i):
        return f"{s}@{i}"

    seen = {(t.initial, 0)}
    queue = [(t.initial, 0)]
    edges = []  # (src-pair, write, dst-pair)
    while queue:
        s, i = queue.pop()
        for r in by_src[s]:
            if r.read == ():
                target = (r.dst, i)
            elif i < len(w) and r.read == (w[i],):
                target = (r.dst, i + 1)
            else:
                continue
            edges.append(((s, i), r.write, target))
            if target not in seen:
                seen.add(target)
                queue.append(target)
    states = {name(s, i) for s, i in seen}
    trans: set = set()
    for k, ((s, i), write, (s2, j)) in enumerate(sorted(edges, key=repr)):
        _expand_write(trans, name(s, i), write, name(s2, j), str(k))
    states |= {st for tr in trans for st in (tr[0], tr[2])}
    accepting = {name(s, i) for s, i in seen if s in t.accepting and i == len(w)}
    return trim(Nfa(states, t.output_alphabet, trans, {name(t.initial, 0)}, accepting))


def fst_inverse(t: Fst) -> Fst:
    """Swap read and write on every rule: v in t(u) iff u in inverse(t)(v)."""
    rules = [FstRule(r.src, r.write, r.read, r.dst) for r in sorted(t.transitions, key=repr)]
    return Fst.build(t.states, t.output_alphabet, t.input_alphabet, rules, t.initial, t.accepting)


def fst_range(t: Fst) -> Nfa:
    """Automaton for the full output language of t (reads dropped, writes kept)."""
    trans: set = set()
    for k, r in enumerate(sorted(t.transitions, key=repr)):
        _expand_write(trans, r.src, r.write, r.dst, str(k))
    states = set(t.states) | {st for tr in trans for st in (tr[0], tr[2])}
    return trim(Nfa(states, t.output_alphabet, trans, {t.initial}, t.accepting))


def fst_relation(t: Fst, max_in: int, max_out: int) -> set[tuple[Word, Word]]:
    """All (u, v) pairs with v in t(u), |u| <= max_in, |v| <= max_out (small helper)."""
    pairs = set()
    for n in range(max_in + 1):
        for u in itertools.product(t.input_alphabet, repeat=n):
            lang = fst_apply(t, u)
            for v in nfa_language(lang, max_out):
                pairs.add((u, v))
    return pairs
