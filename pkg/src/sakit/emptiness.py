"""Exact emptiness for set automata via reachability over abstract set contents.

The decision reduces to: does a given finite automaton over the protocol
alphabet accept a correct protocol?  Query words are represented by their
membership signature across the automaton's query languages (their elementary
type); the set content is abstracted to the set of types currently present,
one representative word per type.  The abstraction is exact: any accepted
correct protocol can be rewritten, type-vector preserved, so that each set
content holds at most one word per type, and the search reconstructs a
concrete validated witness from any accepting abstract path.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .automata import (Nfa, Word, fst_range, iter_words, nfa_accepts,
                       nfa_complement, nfa_count_at_least, nfa_emptiness,
                       nfa_product, remove_eps, trim, word_key)
from .core import HASH, OPS, SetAutomaton
from .protocol import Protocol, QueryBlock, replay_contents, replay_correct

# an elementary type is the set of (1-based) family indices containing a word;
# a set abstraction is the set of types with a representative currently present
ElementaryType = frozenset
SetAbstraction = frozenset

DIAMOND = "◊"


@dataclass(frozen=True)
class QueryTriple:
    src: str
    dst: str
    op: str


class QueryLanguageFamily:
    """Ordered query languages R(1..N) over a common work alphabet.

    Elementary-language automata and their cardinality decisions are memoized
    on the family instance.
    """

    def __init__(self, languages: Iterable[Nfa], gamma: Iterable[str]):
        self.languages = tuple(languages)
        self.gamma = tuple(gamma)
        self._elem: dict[frozenset, Nfa] = {}
        self._nonempty: dict[frozenset, bool] = {}
        self._two: dict[frozenset, bool] = {}
        for lang in self.languages:
            if set(lang.alphabet) != set(self.gamma):
                raise ValueError("family languages must share the work alphabet")

    def __len__(self):
        return len(self.languages)

    def language(self, i: int) -> Nfa:
        """1-based access, matching the family indexing."""
        return self.languages[i - 1]

    def universal(self) -> Nfa:
        return Nfa({"u"}, self.gamma, {("u", g, "u") for g in self.gamma}, {"u"}, {"u"})

    def elementary(self, indices: frozenset) -> Nfa:
        """Automaton for the words lying in exactly the indexed languages."""
        indices = frozenset(indices)
        if indices not in self._elem:
            acc = self.universal()
            for i in range(1, len(self.languages) + 1):
                part = self.language(i) if i in indices else nfa_complement(self.language(i))
                acc = nfa_product(acc, part)
            self._elem[indices] = trim(acc)
        return self._elem[indices]

    def signature(self, word: Word) -> frozenset:
        return frozenset(i for i in range(1, len(self.languages) + 1)
                         if nfa_accepts(self.language(i), word))


def elementary_nonempty(fam: QueryLanguageFamily, indices) -> bool:
    indices = frozenset(indices)
    if indices not in fam._nonempty:
        fam._nonempty[indices] = not nfa_emptiness(fam.elementary(indices))
    return fam._nonempty[indices]


def elementary_at_least_two(fam: QueryLanguageFamily, indices) -> bool:
    indices = frozenset(indices)
    if indices not in fam._two:
        fam._two[indices] = nfa_count_at_least(fam.elementary(indices), 2)
    return fam._two[indices]


# ---------------------------------------------------------------------------
# query-language extraction


def _protocol_gamma(alphabet) -> tuple[str, ...]:
    reserved = {HASH, *OPS}
    return tuple(s for s in alphabet if s not in reserved)


def extract_query_languages(a: Nfa) -> tuple[QueryLanguageFamily, dict[QueryTriple, int]]:
    """Per state pair and operation, the words readable between delimiters.

    Only nonempty languages are kept; they are indexed densely from 1 in a
    fixed state order.  All returned automata share the underlying work-symbol
    transition structure and differ in initial/accepting sets.
    """
    a2 = remove_eps(trim(a))
    gamma = _protocol_gamma(a2.alphabet)
    states = sorted(a2.states)
    succ: dict[tuple[str, str], set[str]] = {}
    for src, label, dst in a2.transitions:
        succ.setdefault((src, label), set()).add(dst)

    def gamma_closure(seed: set[str]) -> set[str]:
        seen = set(seed)
        stack = list(seed)
        while stack:
            s = stack.pop()
            for g in gamma:
                for t in succ.get((s, g), ()):
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
        return seen

    gamma_trans = {(s, g, d) for (s, g), ds in succ.items() if g in set(gamma) for d in ds}
    triples = []
    for q in states:
        entry = succ.get((q, HASH), set())
        if not entry:
            continue
        reach = gamma_closure(set(entry))
        outs: dict[tuple[str, str], set[str]] = {}
        for r in reach:
            for r2 in succ.get((r, HASH), ()):
                for op in OPS:
                    for q2 in succ.get((r2, op), ()):
                        outs.setdefault((q2, op), set()).add(r)
        for (q2, op), pre in sorted(outs.items(), key=lambda kv: (kv[0][0], OPS.index(kv[0][1]))):
            triples.append((QueryTriple(q, q2, op), frozenset(entry), frozenset(pre)))

    languages = []
    mapping = {}
    for i, (triple, entry, pre) in enumerate(triples, start=1):
        # accepting set: states from which '# op' completes the block to triple.dst
        accepting = {r for r in pre}
        lang = trim(Nfa(a2.states, gamma, gamma_trans, entry, accepting))
        languages.append(lang)
        mapping[triple] = i
    return QueryLanguageFamily(languages, gamma), mapping


# ---------------------------------------------------------------------------
# perfect-shuffle cardinality check


def shuffle_at_least_two(nfas: list[Nfa]) -> bool:
    """Decide whether the intersection of the languages holds two words,
    via the padded perfect-shuffle construction over a fresh dummy symbol."""
    if not nfas:
        raise ValueError("need at least one automaton")
    sigma = nfas[0].alphabet
    if any(set(a.alphabet) != set(sigma) for a in nfas):
        raise ValueError("common alphabet required")
    if DIAMOND in sigma:
        raise ValueError("dummy padding symbol collides with the alphabet")
    ext = tuple(sigma) + (DIAMOND,)

    def padded(a: Nfa) -> Nfa:
        states = set(a.states) | {"pad!"}
        trans = set(a.transitions) | {(f, None, "pad!") for f in a.accepting}
        trans.add(("pad!", DIAMOND, "pad!"))
        return remove_eps(Nfa(states, ext, trans, a.initial, set(a.accepting) | {"pad!"}))

    def interleaved(a: Nfa) -> Nfa:
        # words u1 v1 u2 v2 ... with odd positions and even positions each in L(a)
        by: dict[str, list[tuple[str, str]]] = {s: [] for s in a.states}
        for src, label, dst in a.transitions:
            by[src].append((label, dst))
        seeds = {(x, y, 0) for x in a.initial for y in a.initial}
        seen = set(seeds)
        queue = list(seeds)
        trans = set()
        name = lambda x, y, t: f"({x};{y};{t})"
        while queue:
            x, y, t = queue.pop()
            if t == 0:
                moves = [((x2, y, 1), c) for c, x2 in by[x]]
            else:
                moves = [((x, y2, 0), c) for c, y2 in by[y]]
            for (x2, y2, t2), c in moves:
                trans.add((name(x, y, t), c, name(x2, y2, t2)))
                if (x2, y2, t2) not in seen:
                    seen.add((x2, y2, t2))
                    queue.append((x2, y2, t2))
        states = {name(*s) for s in seen}
        accepting = {name(x, y, t) for x, y, t in seen
                     if t == 0 and x in a.accepting and y in a.accepting}
        return Nfa(states, ext, trans, {name(*s) for s in seeds}, accepting)

    def mismatch() -> Nfa:
        states = {"e", "found_e", "found_o"} | {f"h:{c}" for c in ext}
        trans = set()
        for c in ext:
            trans.add(("e", c, f"h:{c}"))
            trans.add((f"h:{c}", c, "e"))
            for d in ext:
                if d != c:
                    trans.add((f"h:{c}", d, "found_e"))
            trans.add(("found_e", c, "found_o"))
            trans.add(("found_o", c, "found_e"))
        return Nfa(states, ext, trans, {"e"}, {"found_e"})

    acc = mismatch()
    for a in nfas:
        acc = nfa_product(acc, interleaved(padded(remove_eps(a))))
    return not nfa_emptiness(acc)


# ---------------------------------------------------------------------------
# the reachability decision


@dataclass(frozen=True)
class TypedProtocol:
    """A protocol together with one family index per block (the block's word
    lies in the indexed query language)."""

    protocol: Protocol
    types: tuple[int, ...]

    def validate(self, fam: QueryLanguageFamily):
        if len(self.types) != len(self.protocol.blocks):
            raise ValueError("type vector length differs from block count")
        for b, i in zip(self.protocol.blocks, self.types):
            if not 1 <= i <= len(fam):
                raise ValueError(f"family index {i} out of range")
            if not nfa_accepts(fam.language(i), b.query_word):
                raise ValueError(f"block {b.position} word not in its query language")


@dataclass
class NrrResult:
    nonempty: bool
    witness: Optional[TypedProtocol] = None
    family: Optional[QueryLanguageFamily] = None


class _TypeTable:
    """Realizable membership signatures of work-tape words, via a breadth-first
    walk of the transition monoid of the automaton's work-symbol structure.

    Each reachable monoid element is the state-to-stateset action of some
    word; its signature (the query triples it realizes) is a nonempty
    elementary type, and every nonempty type arises this way.  The element
    graph doubles as a deterministic automaton for each R_type, which gives
    cardinality answers and length-lexicographic representatives.
    """

    def __init__(self, a2: Nfa):
        self.a2 = a2
        self.gamma = _protocol_gamma(a2.alphabet)
        self.states = sorted(a2.states)
        self.idx = {s: i for i, s in enumerate(self.states)}
        n = len(self.states)
        succ_hash = [0] * n
        succ_op = {op: [0] * n for op in OPS}
        succ_gamma = {g: [0] * n for g in self.gamma}
        for src, label, dst in a2.transitions:
            i, j = self.idx[src], self.idx[dst]
            if label == HASH:
                succ_hash[i] |= 1 << j
            elif label in succ_op:
                succ_op[label][i] |= 1 << j
            elif label in succ_gamma:
                succ_gamma[label][i] |= 1 << j
        self.succ_hash = succ_hash
        self.succ_op = succ_op
        self.succ_gamma = succ_gamma

        entry = {i: succ_hash[i] for i in range(n) if succ_hash[i]}
        self.entry = entry
        # the universe: work-symbol closure of all entry states
        uni = 0
        for m in entry.values():
            uni |= m
        frontier = uni
        while frontier:
            new = 0
            bits = frontier
            while bits:
                b = bits & -bits
                i = b.bit_length() - 1
                bits ^= b
                for g in self.gamma:
                    new |= succ_gamma[g][i]
            frontier = new & ~uni
            uni |= new
        self.universe = [i for i in range(n) if (uni >> i) & 1]
        self.upos = {i: k for k, i in enumerate(self.universe)}

        # blocks exit through '# op' edges; precompute, per universe state,
        # the (op, dst) pairs it can close a block with
        self.closers: list[list[tuple[str, int]]] = []
        for i in self.universe:
            outs = []
            bits = succ_hash[i]
            while bits:
                b = bits & -bits
                r2 = b.bit_length() - 1
                bits ^= b
                for op in OPS:
                    obits = succ_op[op][r2]
                    while obits:
                        ob = obits & -obits
                        q2 = ob.bit_length() - 1
                        obits ^= ob
                        outs.append((op, q2))
            self.closers.append(sorted(set(outs)))

        self._walk_monoid()

    def _walk_monoid(self):
        k = len(self.universe)
        ident = tuple(1 << self.upos[i] for i in self.universe)
        elems = {ident: 0}
        order = [ident]
        words: list[Word] = [()]
        edges: list[dict[str, int]] = []
        queue = deque([0])
        # per-symbol successor masks in universe coordinates
        gsucc = {g: [self._to_uni(self.succ_gamma[g][i]) for i in self.universe]
                 for g in self.gamma}
        while queue:
            eid = queue.popleft()
            rows = order[eid]
            out = {}
            for g in self.gamma:
                table = gsucc[g]
                new_rows = []
                for row in rows:
                    acc = 0
                    bits = row
                    while bits:
                        b = bits & -bits
                        acc |= table[b.bit_length() - 1]
                        bits ^= b
                    new_rows.append(acc)
                key = tuple(new_rows)
                nid = elems.get(key)
                if nid is None:
                    nid = len(order)
                    elems[key] = nid
                    order.append(key)
                    words.append(words[eid] + (g,))
                    queue.append(nid)
                out[g] = nid
            edges.append(out)
        self.elem_rows = order
        self.elem_edges = edges
        self.elem_words = words
        self._signatures()

    def _to_uni(self, mask: int) -> int:
        out = 0
        bits = mask
        while bits:
            b = bits & -bits
            i = b.bit_length() - 1
            bits ^= b
            pos = self.upos.get(i)
            if pos is not None:
                out |= 1 << pos
        return out

    def _signatures(self):
        # signature of an element: the query triples its word realizes
        self.elem_sig: list[frozenset] = []
        type_ids: dict[frozenset, int] = {}
        self.types: list[frozenset] = []
        self.type_elems: dict[int, list[int]] = {}
        for eid, rows in enumerate(self.elem_rows):
            sig = set()
            for q, emask in self.entry.items():
                img = 0
                bits = self._to_uni(emask)
                while bits:
                    b = bits & -bits
                    img |= rows[b.bit_length() - 1]
                    bits ^= b
                while img:
                    b = img & -img
                    upos = b.bit_length() - 1
                    img ^= b
                    for op, q2 in self.closers[upos]:
                        sig.add((q, q2, op))
            fsig = frozenset(sig)
            self.elem_sig.append(fsig)
            if not fsig:
                continue
            tid = type_ids.get(fsig)
            if tid is None:
                tid = len(self.types)
                type_ids[fsig] = tid
                self.types.append(fsig)
                self.type_elems[tid] = []
            self.type_elems[tid].append(eid)
        # moves: state -> type -> [(dst-state, op)]
        self.moves: dict[int, dict[int, list[tuple[int, str]]]] = {}
        for tid, sig in enumerate(self.types):
            for q, q2, op in sig:
                self.moves.setdefault(q, {}).setdefault(tid, []).append((q2, op))
        for per_state in self.moves.values():
            for lst in per_state.values():
                lst.sort()
        self._two_cache: dict[int, bool] = {}
        self._reps_cache: dict[int, tuple[Word, Optional[Word]]] = {}

    def type_automaton(self, tid: int) -> Nfa:
        states = {f"m{i}" for i in range(len(self.elem_rows))}
        trans = {(f"m{i}", g, f"m{out[g]}") for i, out in enumerate(self.elem_edges)
                 for g in self.gamma}
        accepting = {f"m{e}" for e in self.type_elems[tid]}
        return Nfa(states, self.gamma, trans, {"m0"}, accepting)

    def at_least_two(self, tid: int) -> bool:
        if tid not in self._two_cache:
            self._two_cache[tid] = nfa_count_at_least(self.type_automaton(tid), 2)
        return self._two_cache[tid]

    def reps(self, tid: int) -> tuple[Word, Optional[Word]]:
        """The one or two length-lexicographically smallest words of the type."""
        if tid not in self._reps_cache:
            gen = iter_words(self.type_automaton(tid))
            first = next(gen)
            second = next(gen, None) if self.at_least_two(tid) else None
            self._reps_cache[tid] = (first, second)
        return self._reps_cache[tid]


def nrr_decide(a: Nfa) -> NrrResult:
    """Does the automaton accept a correct protocol?

    Memoized reachability over (state, present types). Per block the search
    picks a realizable type containing a triple enabled at the current state;
    insertion adds the type, removal on a present type branches between
    dropping it and (when the type holds two words) keeping it, and tests are
    enabled by presence/absence with the two-word proviso for negative tests
    on present types.  A reconstructed witness is validated before returning.
    """
    a2 = remove_eps(trim(a))
    if not a2.accepting:
        return NrrResult(False)
    table = _TypeTable(a2)
    idx = table.idx
    accepting = {idx[s] for s in a2.accepting}
    initial = sorted(idx[s] for s in a2.initial)

    # parent edges: node -> (previous node, type id, op, representative kind)
    parent: dict[tuple[int, frozenset], Optional[tuple]] = {}
    start_nodes = [(q, frozenset()) for q in initial]
    queue = deque(start_nodes)
    seen = set(start_nodes)

    def reconstruct(node) -> NrrResult:
        rev = []
        while parent.get(node) is not None:
            prev, tid, op, kind = parent[node]
            rev.append((prev[0], node[0], tid, op, kind))
            node = prev
        path = list(reversed(rev))
        blocks = []
        fam, mapping = extract_query_languages(a)
        types = []
        names = table.states
        for pos, (q, q2, tid, op, kind) in enumerate(path):
            u, v = table.reps(tid)
            word = u if kind == "u" else v
            blocks.append(QueryBlock(word, op, pos))
            types.append(mapping[QueryTriple(names[q], names[q2], op)])
        proto = Protocol(tuple(blocks), table.gamma)
        tp = TypedProtocol(proto, tuple(types))
        # the witness must replay correctly and be accepted by the automaton
        assert replay_correct(proto), "abstract witness failed set replay"
        assert nfa_accepts(a, proto.word()), "abstract witness rejected by the automaton"
        tp.validate(fam)
        return NrrResult(True, tp, fam)

    while queue:
        node = queue.popleft()
        q, present = node
        per_type = table.moves.get(q)
        if not per_type:
            continue
        for tid in sorted(per_type):
            for q2, op in per_type[tid]:
                succs = []
                if op == "in":
                    succs.append((present | {tid}, "u"))
                elif op == "out":
                    if tid in present:
                        succs.append((present - {tid}, "u"))
                        if table.at_least_two(tid):
                            succs.append((present, "v"))
                    else:
                        succs.append((present, "v" if table.at_least_two(tid) else "u"))
                elif op == "test+":
                    if tid in present:
                        succs.append((present, "u"))
                else:  # test-
                    if tid not in present:
                        succs.append((present, "v" if table.at_least_two(tid) else "u"))
                    elif table.at_least_two(tid):
                        succs.append((present, "v"))
                for present2, kind in succs:
                    node2 = (q2, present2)
                    if node2 in seen:
                        continue
                    seen.add(node2)
                    parent[node2] = (node, tid, op, kind)
                    if q2 in accepting:
                        return reconstruct(node2)
                    queue.append(node2)
    return NrrResult(False)


@dataclass
class BruteForceResult:
    found: bool
    witness: Optional[Protocol] = None


def brute_force_nrr(a: Nfa, max_blocks: int, max_word_len: int) -> BruteForceResult:
    """Independent oracle: enumerate protocols within the bounds, smallest
    block count first, and return the first one the automaton accepts whose
    replay is consistent."""
    if max_blocks < 0 or max_word_len < 0:
        raise ValueError("bounds must be nonnegative")
    a2 = remove_eps(trim(a))
    if not a2.accepting:
        return BruteForceResult(False)
    gamma = _protocol_gamma(a2.alphabet)
    states = sorted(a2.states)
    idx = {s: i for i, s in enumerate(states)}
    succ: dict[tuple[int, str], int] = {}
    for src, label, dst in a2.transitions:
        key = (idx[src], label)
        succ[key] = succ.get(key, 0) | (1 << idx[dst])
    acc_mask = sum(1 << idx[s] for s in a2.accepting)
    init_mask = sum(1 << idx[s] for s in a2.initial)

    def step_mask(mask: int, label: str) -> int:
        out = 0
        while mask:
            b = mask & -mask
            out |= succ.get((b.bit_length() - 1, label), 0)
            mask ^= b
        return out

    words = []
    for n in range(max_word_len + 1):
        words.extend(itertools.product(gamma, repeat=n))

    def walk_word(mask: int, word: Word) -> int:
        for sym in word:
            mask = step_mask(mask, sym)
            if not mask:
                return 0
        return mask

    # level-by-level search over (automaton state set, set content); a node
    # reached at a later level cannot yield anything a shorter prefix missed
    start = (init_mask, frozenset())
    parent: dict[tuple[int, frozenset], Optional[tuple]] = {start: None}
    level = [start]
    for _ in range(max_blocks):
        nxt = []
        for mask, content in level:
            after_hash = step_mask(mask, HASH)
            if not after_hash:
                continue
            for word in words:
                m2 = walk_word(after_hash, word)
                if not m2:
                    continue
                m3 = step_mask(m2, HASH)
                if not m3:
                    continue
                for op in ("in", "out", "test+" if word in content else "test-"):
                    m4 = step_mask(m3, op)
                    if not m4:
                        continue
                    if op == "in":
                        c2 = content | {word}
                    elif op == "out":
                        c2 = content - {word}
                    else:
                        c2 = content
                    key = (m4, c2)
                    if key in parent:
                        continue
                    parent[key] = ((mask, content), word, op)
                    if m4 & acc_mask:
                        chain = []
                        cur = key
                        while parent[cur] is not None:
                            prev, w, o = parent[cur]
                            chain.append((w, o))
                            cur = prev
                        blocks = [QueryBlock(w, o, pos)
                                  for pos, (w, o) in enumerate(reversed(chain))]
                        proto = Protocol(tuple(blocks), gamma)
                        assert replay_correct(proto)
                        assert nfa_accepts(a, proto.word())
                        return BruteForceResult(True, proto)
                    nxt.append(key)
        level = nxt
        if not level:
            break
    return BruteForceResult(False)


# ---------------------------------------------------------------------------
# machine-level emptiness


@dataclass
class EmptinessResult:
    empty: bool
    witness: Optional[Protocol] = None       # over the machine's own work alphabet
    raw_witness: Optional[Protocol] = None   # over the normalized alphabet (a, b)
    typed_witness: Optional[TypedProtocol] = None
    range_nfa: Optional[Nfa] = None


def sa_emptiness(sa: SetAutomaton) -> EmptinessResult:
    """Decide whether the machine accepts any word at all.

    Normalize, build the extractor, take its full output language, and ask
    whether it contains a correct protocol; a positive answer comes with a
    witness protocol, decoded back to the machine's own work alphabet."""
    from .cone import build_extractor
    from .normalform import is_normalized, normalize_requirements

    encoded = not (set(sa.work_alphabet) <= {"a", "b"})
    m = sa if is_normalized(sa) else normalize_requirements(sa)
    rng = fst_range(build_extractor(m))
    res = nrr_decide(rng)
    if not res.nonempty:
        return EmptinessResult(True, range_nfa=rng)
    raw = res.witness.protocol
    witness = _decode_protocol(raw, sa.work_alphabet) if encoded else raw
    return EmptinessResult(False, witness=witness, raw_witness=raw,
                           typed_witness=res.witness, range_nfa=rng)


def _decode_protocol(p: Protocol, original_gamma: tuple[str, ...]) -> Protocol:
    """Invert the b a^i b letter coding applied by requirement normalization."""
    blocks = []
    for b in p.blocks:
        word = b.query_word
        out = []
        i = 0
        while i < len(word):
            if word[i] != "b":
                raise ValueError(f"undecodable query word {word}")
            j = i + 1
            while j < len(word) and word[j] == "a":
                j += 1
            if j >= len(word) or word[j] != "b":
                raise ValueError(f"undecodable query word {word}")
            count = j - i - 1
            if not 1 <= count <= len(original_gamma):
                raise ValueError(f"letter index {count} outside the original alphabet")
            out.append(original_gamma[count - 1])
            i = j + 1
        blocks.append(QueryBlock(tuple(out), b.op, b.position))
    return Protocol(tuple(blocks), original_gamma)


# ---------------------------------------------------------------------------
# small/large classification and the two protocol transformations


def classify_small_large(fam: QueryLanguageFamily):
    """Iteratively declare languages small while they hold at most N words
    outside the words of previously small languages; returns the partition
    and the enumerated union of the small languages (the stable words)."""
    n = len(fam)
    small: set[int] = set()
    stable: set[Word] = set()
    changed = True
    while changed:
        changed = False
        newly = []
        for i in range(1, n + 1):
            if i in small:
                continue
            outside = 0
            for w in iter_words(fam.language(i)):
                if w in stable:
                    continue
                outside += 1
                if outside > n:
                    break
            if outside <= n:
                newly.append(i)
        for i in newly:
            small.add(i)
            for w in iter_words(fam.language(i)):
                stable.add(w)
            changed = True
    large = frozenset(range(1, n + 1)) - frozenset(small)
    ws = tuple(sorted(stable, key=lambda w: word_key(w, fam.gamma)))
    return frozenset(small), large, ws


def _require_valid(tp: TypedProtocol, fam: QueryLanguageFamily):
    if not replay_correct(tp.protocol):
        raise ValueError("protocol is not correct")
    tp.validate(fam)


def transform_bound_set(tp: TypedProtocol, fam: QueryLanguageFamily) -> TypedProtocol:
    """Rewrite a correct typed protocol, preserving its type vector, so that
    every replayed set content consists of stable and critical words only
    (at most N^2 + N words)."""
    _require_valid(tp, fam)
    n = len(fam)
    small, large, ws = classify_small_large(fam)
    stable = set(ws)
    blocks = tp.protocol.blocks
    contents = [frozenset()] + replay_contents(tp.protocol)

    def in_lang(i: int, w: Word) -> bool:
        return nfa_accepts(fam.language(i), w)

    def fresh_outside(i: int, content: frozenset) -> bool:
        # does the content already hold an unstable word of R(i)?
        return all(w in stable or not in_lang(i, w) for w in content)

    critical: set[Word] = set()
    for k, b in enumerate(blocks):
        if b.op != "in" or b.query_word in stable:
            continue
        for i in sorted(large):
            if in_lang(i, b.query_word) and all(fresh_outside(i, contents[j]) for j in range(k + 1)):
                critical.add(b.query_word)
                break

    def assigned_critical(k: int, fam_index: int) -> Word:
        # the first insertion of an unstable word of this query language
        for j in range(1, k + 1):
            prev, cur = contents[j - 1], contents[j]
            added = cur - prev
            if not added:
                continue
            (w,) = added
            if w not in stable and in_lang(fam_index, w):
                return w
        raise AssertionError("noncritical block without an earlier insertion")

    def out_substitute(fam_index: int) -> Word:
        banned = critical | stable
        for w in iter_words(fam.language(fam_index)):
            if w not in banned:
                return w
        raise AssertionError("large language exhausted")

    new_blocks = []
    for k, b in enumerate(blocks):
        w = b.query_word
        if w in stable:
            new_blocks.append(b)
        elif b.op in ("in", "test+"):
            if w in critical:
                new_blocks.append(b)
            else:
                new_blocks.append(QueryBlock(assigned_critical(k, tp.types[k]), b.op, b.position))
        else:
            new_blocks.append(QueryBlock(out_substitute(tp.types[k]), b.op, b.position))
    out = TypedProtocol(Protocol(tuple(new_blocks), tp.protocol.gamma), tp.types)
    out.validate(fam)
    return out


def transform_unique_per_type(tp: TypedProtocol, fam: QueryLanguageFamily) -> TypedProtocol:
    """Rewrite a correct typed protocol, preserving its type vector, so that
    every replayed set content holds at most one word per elementary type:
    insertions and positive tests use the type's first representative,
    removals and negative tests its second."""
    _require_valid(tp, fam)
    reps: dict[frozenset, tuple[Word, Word]] = {}
    new_blocks = []
    for b in tp.protocol.blocks:
        sig = fam.signature(b.query_word)
        if not elementary_at_least_two(fam, sig):
            new_blocks.append(b)
            continue
        if sig not in reps:
            gen = iter_words(fam.elementary(sig))
            reps[sig] = (next(gen), next(gen))
        u, v = reps[sig]
        word = u if b.op in ("in", "test+") else v
        new_blocks.append(QueryBlock(word, b.op, b.position))
    out = TypedProtocol(Protocol(tuple(new_blocks), tp.protocol.gamma), tp.types)
    out.validate(fam)
    return out
