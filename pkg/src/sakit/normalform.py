"""Normal forms for set automata.

normalize_requirements brings any machine to the shape the protocol machinery
expects: binary work alphabet, no endmarker, acceptance only right after a set
operation.  to_anf splits states by the action performed on entry.
remove_eps_loops compiles away cycles of empty moves from a deterministic
machine, leaving an acyclic empty-move graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .automata import Word, word_key
from .core import (END, InRule, NotDeterministic, OutRule, SetAutomaton,
                   TestRule, TransitionRule, WriteRule, rule_targets)


# ---------------------------------------------------------------------------
# requirements: binary work alphabet, no endmarker, accept only after an op


def _map_rule(rule: TransitionRule, f) -> TransitionRule:
    """Relabel endpoints of a rule through f (word/symbol unchanged)."""
    if isinstance(rule, WriteRule):
        return WriteRule(f(rule.src), rule.sym, rule.word, f(rule.dst))
    if isinstance(rule, InRule):
        return InRule(f(rule.src), rule.sym, f(rule.dst))
    if isinstance(rule, OutRule):
        return OutRule(f(rule.src), rule.sym, f(rule.dst))
    return TestRule(f(rule.src), rule.sym, f(rule.dst_plus), f(rule.dst_minus))


def _encode_binary(sa: SetAutomaton) -> SetAutomaton:
    """Re-encode the work alphabet over {a, b}: the i-th letter becomes b a^i b."""
    code = {sym: ("b",) + ("a",) * (i + 1) + ("b",)
            for i, sym in enumerate(sa.work_alphabet)}
    rules = []
    for r in sa.transitions:
        if isinstance(r, WriteRule):
            enc = tuple(s for sym in r.word for s in code[sym])
            rules.append(WriteRule(r.src, r.sym, enc, r.dst))
        else:
            rules.append(r)
    return SetAutomaton(sa.states, sa.input_alphabet, ("a", "b"), sa.uses_endmarker,
                        rules, sa.initial, sa.accepting)


def _remove_endmarker(sa: SetAutomaton) -> SetAutomaton:
    """Guess the end of the input: endmarker rules become empty moves into a
    final phase where only empty moves remain live."""
    pre = lambda s: f"{s}|pre"
    post = lambda s: f"{s}|post"
    rules: list[TransitionRule] = []
    for r in sa.transitions:
        if r.sym == END:
            moved = _map_rule(r, post)
            rules.append(_retarget_src(_strip_sym(moved), pre(r.src)))
        elif r.sym is None:
            rules.append(_map_rule(r, pre))
            rules.append(_map_rule(r, post))
        else:
            rules.append(_map_rule(r, pre))
    states = {pre(s) for s in sa.states} | {post(s) for s in sa.states}
    return SetAutomaton(states, sa.input_alphabet, sa.work_alphabet, False,
                        rules, pre(sa.initial), {post(f) for f in sa.accepting})


def _strip_sym(rule: TransitionRule) -> TransitionRule:
    if isinstance(rule, WriteRule):
        return WriteRule(rule.src, None, rule.word, rule.dst)
    if isinstance(rule, InRule):
        return InRule(rule.src, None, rule.dst)
    if isinstance(rule, OutRule):
        return OutRule(rule.src, None, rule.dst)
    return TestRule(rule.src, None, rule.dst_plus, rule.dst_minus)


def _retarget_src(rule: TransitionRule, src: str) -> TransitionRule:
    if isinstance(rule, WriteRule):
        return WriteRule(src, rule.sym, rule.word, rule.dst)
    if isinstance(rule, InRule):
        return InRule(src, rule.sym, rule.dst)
    if isinstance(rule, OutRule):
        return OutRule(src, rule.sym, rule.dst)
    return TestRule(src, rule.sym, rule.dst_plus, rule.dst_minus)


def accepts_only_after_operation(sa: SetAutomaton) -> bool:
    """Structural check: no accepting initial state and every transition into
    an accepting state performs a set operation."""
    if sa.initial in sa.accepting:
        return False
    for r in sa.transitions:
        if isinstance(r, WriteRule) and r.dst in sa.accepting:
            return False
    return True


def _append_dummy_op(sa: SetAutomaton) -> SetAutomaton:
    """Track whether the last move was an operation; where a run would accept
    after a plain write, a dummy test (both branches accepting) is appended."""
    wr = lambda s: f"{s}|w"
    op = lambda s: f"{s}|o"
    acc = "acc!"
    rules: list[TransitionRule] = []
    for r in sa.transitions:
        for tag in (wr, op):
            if isinstance(r, WriteRule):
                rules.append(WriteRule(tag(r.src), r.sym, r.word, wr(r.dst)))
            elif isinstance(r, InRule):
                rules.append(InRule(tag(r.src), r.sym, op(r.dst)))
            elif isinstance(r, OutRule):
                rules.append(OutRule(tag(r.src), r.sym, op(r.dst)))
            else:
                rules.append(TestRule(tag(r.src), r.sym, op(r.dst_plus), op(r.dst_minus)))
    for f in sorted(sa.accepting):
        rules.append(TestRule(wr(f), None, acc, acc))
    states = {wr(s) for s in sa.states} | {op(s) for s in sa.states} | {acc}
    accepting = {op(f) for f in sa.accepting} | {acc}
    return SetAutomaton(states, sa.input_alphabet, sa.work_alphabet, sa.uses_endmarker,
                        rules, wr(sa.initial), accepting)


def normalize_requirements(sa: SetAutomaton) -> SetAutomaton:
    """Equivalent machine with work alphabet (a, b), no endmarker, and
    acceptance only right after an operation.

    Passes that already hold are skipped, so a machine satisfying all three
    comes back unchanged.  The result is nondeterministic in general: guessing
    the input's end has no deterministic counterpart here.
    """
    m = sa
    if set(m.work_alphabet) != {"a", "b"}:
        if set(m.work_alphabet) <= {"a", "b"}:
            m = SetAutomaton(m.states, m.input_alphabet, ("a", "b"), m.uses_endmarker,
                             m.transitions, m.initial, m.accepting)
        else:
            m = _encode_binary(m)
    if m.uses_endmarker:
        m = _remove_endmarker(m)
    if not accepts_only_after_operation(m):
        m = _append_dummy_op(m)
    return m


def is_normalized(sa: SetAutomaton) -> bool:
    return (set(sa.work_alphabet) == {"a", "b"}
            and not sa.uses_endmarker
            and accepts_only_after_operation(sa))


# ---------------------------------------------------------------------------
# action normal form


_MARKS = {"WriteRule": "w", "InRule": "i", "OutRule": "o"}


def to_anf(sa: SetAutomaton) -> SetAutomaton:
    """Split each state by the action marking its incoming transitions and give
    the initial state a fresh copy with no incoming transitions."""
    name = lambda s, m: f"{s}|{m}"
    start = name(sa.initial, "0")
    per_state = {s: [r for r in sa.transitions if r.src == s] for s in sa.states}

    def moves(s, m):
        cur = name(s, m)
        out = []
        for r in per_state[s]:
            if isinstance(r, WriteRule):
                out.append((WriteRule(cur, r.sym, r.word, name(r.dst, "w")), [(r.dst, "w")]))
            elif isinstance(r, InRule):
                out.append((InRule(cur, r.sym, name(r.dst, "i")), [(r.dst, "i")]))
            elif isinstance(r, OutRule):
                out.append((OutRule(cur, r.sym, name(r.dst, "o")), [(r.dst, "o")]))
            else:
                out.append((TestRule(cur, r.sym, name(r.dst_plus, "t+"), name(r.dst_minus, "t-")),
                            [(r.dst_plus, "t+"), (r.dst_minus, "t-")]))
        return out

    seen = {(sa.initial, "0")}
    queue = [(sa.initial, "0")]
    rules = []
    while queue:
        s, m = queue.pop()
        for rule, targets in moves(s, m):
            rules.append(rule)
            for t in targets:
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
    states = {name(s, m) for s, m in seen}
    accepting = {name(s, m) for s, m in seen if s in sa.accepting}
    return SetAutomaton(states, sa.input_alphabet, sa.work_alphabet, sa.uses_endmarker,
                        sorted(rules, key=repr), start, accepting)


# ---------------------------------------------------------------------------
# empty-move loop removal for deterministic machines


@dataclass(frozen=True)
class EpsPathSummary:
    """Outcome of the unique empty-move walk from a state under a membership
    vector: divergence, or the exit state with the writes and tracked-set
    updates performed along the way."""

    diverges: bool
    exit_state: Optional[str]
    written: Word
    flips: tuple[tuple[int, bool], ...]   # (tracked-word index, now-present)


def eps_segment_words(dsa: SetAutomaton) -> tuple[Word, ...]:
    """The finite set of words writable between consecutive queries on
    empty-move paths (the tracked words), in length-lexicographic order."""
    eps = {r.src: r for r in dsa.transitions if r.sym is None}
    starts = set()
    for r in eps.values():
        if not isinstance(r, WriteRule):
            starts.update(rule_targets(r))
    words = set()
    for p in sorted(starts):
        q, word, seen = p, (), {p}
        while True:
            r = eps.get(q)
            if r is None:
                break
            if isinstance(r, WriteRule):
                word = word + r.word
                q = r.dst
                if q in seen:
                    break  # write-only cycle: that walk diverges
                seen.add(q)
            else:
                words.add(word)
                break
    return tuple(sorted(words, key=lambda w: word_key(w, dsa.work_alphabet)))


def remove_eps_loops(dsa: SetAutomaton) -> SetAutomaton:
    """Equivalent deterministic machine whose empty-move graph is acyclic.

    States carry a membership vector over the tracked words plus the current
    tape's position inside their prefix tree.  Every empty-move path is
    precomputed under that vector and replayed as a fresh acyclic chain of
    real transitions (tests whose outcome the vector decides have both
    branches wired to the decided successor).  A first query on a tape whose
    content is not tracked stays a genuinely branching test.  A walk that
    provably loops ends at a rule-less chain state: by then every machine
    state the diverging run could ever visit has already been replayed once,
    so no accepting configuration is lost.
    """
    if not dsa.is_deterministic():
        raise NotDeterministic("remove_eps_loops requires a deterministic machine")
    if all(r.sym is not None for r in dsa.transitions):
        return dsa

    eps = {r.src: r for r in dsa.transitions if r.sym is None}
    tracked = eps_segment_words(dsa)
    index = {w: i for i, w in enumerate(tracked)}
    prefixes = {w[:i] for w in tracked for i in range(len(w) + 1)} | {()}
    BOTTOM = "!"  # tape left the prefix tree: it can never match a tracked word

    def extend(aux, word: Word):
        if aux == BOTTOM:
            return BOTTOM
        for sym in word:
            aux = aux + (sym,)
            if aux not in prefixes:
                return BOTTOM
        return aux

    def exact_of(aux):
        return index.get(aux) if aux != BOTTOM else None

    def name(s, bits, aux):
        aux_s = BOTTOM if aux == BOTTOM else "".join(aux)
        return f"{s}|{''.join('1' if b else '0' for b in bits)}|{aux_s}"

    states: set[str] = set()
    rules: list[TransitionRule] = []
    accepting: set[str] = set()
    exits: list[tuple] = []

    def ensure(state_name, is_acc):
        states.add(state_name)
        if is_acc:
            accepting.add(state_name)

    def land(st, bits, aux, fresh):
        """Name for the walk's next stop: a fresh chain state while the walk
        continues, the plain (state, vector, tape) name once it exits."""
        if eps.get(st) is None:
            triple = (st, tuple(bits), aux)
            exits.append(triple)
            ensure(name(*triple), st in dsa.accepting)
            return name(*triple), False
        n = fresh()
        ensure(n, st in dsa.accepting)
        return n, True

    def walk(cur_name, state, bits, aux, seg_seen, boundaries, first, fresh):
        """Emit the deterministic empty-move walk; stops silently on a loop."""
        bits = list(bits)
        while True:
            r = eps.get(state)
            if r is None:
                return
            if isinstance(r, WriteRule):
                if r.dst in seg_seen:
                    return  # write-only loop: everything ahead was already visited
                aux2 = extend(aux, r.word)
                nxt, cont = land(r.dst, bits, aux2, fresh)
                rules.append(WriteRule(cur_name, None, r.word, nxt))
                if not cont:
                    return
                seg_seen.add(r.dst)
                cur_name, state, aux = nxt, r.dst, aux2
                continue
            exact = exact_of(aux)
            if isinstance(r, (InRule, OutRule)):
                if exact is not None:
                    bits[exact] = isinstance(r, InRule)
                key = (r.dst, tuple(bits))
                if key in boundaries:
                    return
                boundaries.add(key)
                nxt, cont = land(r.dst, bits, (), fresh)
                rules.append((InRule if isinstance(r, InRule) else OutRule)(cur_name, None, nxt))
                if not cont:
                    return
                cur_name, state, aux = nxt, r.dst, ()
                seg_seen = {state}
                first = False
                continue
            # test
            if first:
                sides = []
                for dst, val in ((r.dst_plus, True), (r.dst_minus, False)):
                    b2 = list(bits)
                    if exact is not None:
                        b2[exact] = val
                    n, cont = land(dst, b2, (), fresh)
                    sides.append((dst, n, cont, b2))
                rules.append(TestRule(cur_name, None, sides[0][1], sides[1][1]))
                for dst, n, cont, b2 in sides:
                    if cont:
                        walk(n, dst, b2, (), {dst}, {(dst, tuple(b2))}, False, fresh)
                return
            if exact is None:
                raise AssertionError("untracked query word past a walk's first query")
            dst = r.dst_plus if bits[exact] else r.dst_minus
            key = (dst, tuple(bits))
            if key in boundaries:
                return
            boundaries.add(key)
            nxt, cont = land(dst, bits, (), fresh)
            rules.append(TestRule(cur_name, None, nxt, nxt))
            if not cont:
                return
            cur_name, state, aux = nxt, dst, ()
            seg_seen = {state}

    m = len(tracked)
    start = (dsa.initial, (False,) * m, ())
    seen = {start}
    queue = [start]
    by_src: dict[str, list[TransitionRule]] = {s: [] for s in dsa.states}
    for r in dsa.transitions:
        by_src[r.src].append(r)
    while queue:
        s, bits, aux = queue.pop()
        cur = name(s, bits, aux)
        ensure(cur, s in dsa.accepting)
        if eps.get(s) is not None:
            counter = [0]

            def fresh(entry=cur):
                counter[0] += 1
                return f"{entry}|c{counter[0]}"

            exits.clear()
            walk(cur, s, bits, aux, {s}, set(), True, fresh)
            for triple in exits:
                if triple not in seen:
                    seen.add(triple)
                    queue.append(triple)
            continue
        for rule in by_src[s]:
            exact = exact_of(aux)
            if isinstance(rule, WriteRule):
                targets = [(rule.dst, bits, extend(aux, rule.word))]
                rules.append(WriteRule(cur, rule.sym, rule.word, name(*targets[0])))
            elif isinstance(rule, (InRule, OutRule)):
                nb = list(bits)
                if exact is not None:
                    nb[exact] = isinstance(rule, InRule)
                targets = [(rule.dst, tuple(nb), ())]
                kind = InRule if isinstance(rule, InRule) else OutRule
                rules.append(kind(cur, rule.sym, name(*targets[0])))
            else:
                bp, bm = list(bits), list(bits)
                if exact is not None:
                    bp[exact] = True
                    bm[exact] = False
                t_plus = (rule.dst_plus, tuple(bp), ())
                t_minus = (rule.dst_minus, tuple(bm), ())
                targets = [t_plus, t_minus]
                rules.append(TestRule(cur, rule.sym, name(*t_plus), name(*t_minus)))
            for t in targets:
                ensure(name(*t), t[0] in dsa.accepting)
                if t not in seen:
                    seen.add(t)
                    queue.append(t)

    return SetAutomaton(states, dsa.input_alphabet, dsa.work_alphabet,
                        dsa.uses_endmarker, sorted(rules, key=repr),
                        name(*start), accepting)


def eps_graph_acyclic(sa: SetAutomaton) -> bool:
    """True iff no chain of empty moves returns to its starting state."""
    adj: dict[str, set[str]] = {s: set() for s in sa.states}
    for r in sa.transitions:
        if r.sym is None:
            for t in rule_targets(r):
                adj[r.src].add(t)
    color: dict[str, int] = {s: 0 for s in sa.states}
    for root in sa.states:
        if color[root]:
            continue
        stack = [(root, iter(sorted(adj[root])))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
            elif color[nxt] == 1:
                return False
            elif color[nxt] == 0:
                color[nxt] = 1
                stack.append((nxt, iter(sorted(adj[nxt]))))
    return True
