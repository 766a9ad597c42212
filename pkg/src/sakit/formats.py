"""Textual machine formats shared by the library and the CLI.

Set-automaton files (';' comments):

    input: 0 1 #
    work: 0 1
    endmarker: yes
    start: copy1
    accept: acc
    copy1 0 write 0 copy1
    copy1 # in after
    after # test after dead
    after end write - acc

Transition symbols are input symbols, `eps`, or `end`; write words are spelt
over the work symbols, `-` for the empty word.

Finite-automaton files are line oriented: `alphabet`, `state`, `initial`,
`accept`, and `trans SRC LABEL DST` lines with `eps` for the empty label.
Transducer files use `input-alphabet`/`output-alphabet` lines and
`trans SRC READ / WRITE DST` with `-` for empty words.
"""

from __future__ import annotations

from .automata import Fst, FstRule, Nfa, Word, tokenize
from .core import (END, InRule, OutRule, SetAutomaton, TestRule,
                   TransitionRule, WriteRule)


class FormatError(ValueError):
    pass


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";")[0].strip()
        if line:
            yield lineno, line


def _word(text: str, alphabet, lineno: int) -> Word:
    if text == "-":
        return ()
    try:
        return tokenize(text, alphabet)
    except ValueError as e:
        raise FormatError(f"line {lineno}: {e}") from None


# ---------------------------------------------------------------------------
# set automata


def parse_sa(text: str) -> SetAutomaton:
    input_alphabet: tuple[str, ...] = ()
    work_alphabet: tuple[str, ...] = ()
    uses_endmarker = False
    initial = None
    accepting: list[str] = []
    rules: list[TransitionRule] = []
    states: set[str] = set()
    for lineno, line in _lines(text):
        if ":" in line and line.split(":", 1)[0] in ("input", "work", "endmarker", "start", "accept"):
            key, rest = line.split(":", 1)
            vals = rest.split()
            if key == "input":
                input_alphabet = tuple(vals)
            elif key == "work":
                work_alphabet = tuple(vals)
            elif key == "endmarker":
                if vals not in (["yes"], ["no"]):
                    raise FormatError(f"line {lineno}: endmarker must be yes or no")
                uses_endmarker = vals == ["yes"]
            elif key == "start":
                if len(vals) != 1:
                    raise FormatError(f"line {lineno}: start takes one state")
                initial = vals[0]
            else:
                accepting.extend(vals)
            continue
        toks = line.split()
        if toks[0] == "state":
            states.update(toks[1:])
            continue
        if len(toks) < 4:
            raise FormatError(f"line {lineno}: malformed transition {line!r}")
        src, sym_t, kind = toks[0], toks[1], toks[2]
        sym = None if sym_t == "eps" else END if sym_t == "end" else sym_t
        if kind == "write":
            if len(toks) != 5:
                raise FormatError(f"line {lineno}: write takes WORD DST")
            rules.append(WriteRule(src, sym, _word(toks[3], work_alphabet, lineno), toks[4]))
        elif kind in ("in", "out"):
            if len(toks) != 4:
                raise FormatError(f"line {lineno}: {kind} takes DST")
            rules.append((InRule if kind == "in" else OutRule)(src, sym, toks[3]))
        elif kind == "test":
            if len(toks) != 5:
                raise FormatError(f"line {lineno}: test takes DST+ DST-")
            rules.append(TestRule(src, sym, toks[3], toks[4]))
        else:
            raise FormatError(f"line {lineno}: unknown transition kind {kind!r}")
        states.add(src)
        states.update((rules[-1].dst_plus, rules[-1].dst_minus)
                      if isinstance(rules[-1], TestRule) else (rules[-1].dst,))
    if initial is None:
        raise FormatError("missing start: line")
    states.add(initial)
    states.update(accepting)
    try:
        return SetAutomaton(states, input_alphabet, work_alphabet, uses_endmarker,
                            rules, initial, accepting)
    except ValueError as e:
        raise FormatError(str(e)) from None


def serialize_sa(sa: SetAutomaton) -> str:
    out = [
        "input: " + " ".join(sa.input_alphabet),
        "work: " + " ".join(sa.work_alphabet),
        "endmarker: " + ("yes" if sa.uses_endmarker else "no"),
        "start: " + sa.initial,
        "accept: " + " ".join(sorted(sa.accepting)),
    ]
    for r in sa.transitions:
        sym = "eps" if r.sym is None else "end" if r.sym == END else r.sym
        if isinstance(r, WriteRule):
            word = "".join(r.word) if r.word else "-"
            out.append(f"{r.src} {sym} write {word} {r.dst}")
        elif isinstance(r, InRule):
            out.append(f"{r.src} {sym} in {r.dst}")
        elif isinstance(r, OutRule):
            out.append(f"{r.src} {sym} out {r.dst}")
        else:
            out.append(f"{r.src} {sym} test {r.dst_plus} {r.dst_minus}")
    isolated = sa.states - {r.src for r in sa.transitions} - _rule_targets(sa) \
        - {sa.initial} - sa.accepting
    for s in sorted(isolated):
        out.append(f"state {s}")
    return "\n".join(out) + "\n"


def _rule_targets(sa: SetAutomaton) -> set[str]:
    out = set()
    for r in sa.transitions:
        out.update((r.dst_plus, r.dst_minus) if isinstance(r, TestRule) else (r.dst,))
    return out


# ---------------------------------------------------------------------------
# finite automata


def parse_nfa(text: str) -> Nfa:
    alphabet: tuple[str, ...] = ()
    states: set[str] = set()
    initial: list[str] = []
    accepting: list[str] = []
    transitions = set()
    for lineno, line in _lines(text):
        toks = line.split()
        head = toks[0]
        if head == "alphabet":
            alphabet = tuple(toks[1:])
        elif head == "state":
            states.update(toks[1:])
        elif head == "initial":
            initial.extend(toks[1:])
        elif head == "accept":
            accepting.extend(toks[1:])
        elif head == "trans":
            if len(toks) != 4:
                raise FormatError(f"line {lineno}: trans takes SRC LABEL DST")
            label = None if toks[2] == "eps" else toks[2]
            transitions.add((toks[1], label, toks[3]))
            states.update((toks[1], toks[3]))
        else:
            raise FormatError(f"line {lineno}: unknown directive {head!r}")
    states.update(initial)
    states.update(accepting)
    try:
        return Nfa(states, alphabet, transitions, initial, accepting)
    except ValueError as e:
        raise FormatError(str(e)) from None


def serialize_nfa(a: Nfa) -> str:
    out = ["alphabet " + " ".join(a.alphabet)]
    out.extend(f"state {s}" for s in sorted(a.states))
    out.extend(f"initial {s}" for s in sorted(a.initial))
    out.extend(f"accept {s}" for s in sorted(a.accepting))
    for src, label, dst in sorted(a.transitions, key=repr):
        out.append(f"trans {src} {label if label is not None else 'eps'} {dst}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# transducers


def parse_fst(text: str) -> Fst:
    in_alpha: tuple[str, ...] = ()
    out_alpha: tuple[str, ...] = ()
    states: set[str] = set()
    initial = None
    accepting: list[str] = []
    rules: list[FstRule] = []
    for lineno, line in _lines(text):
        toks = line.split()
        head = toks[0]
        if head == "input-alphabet":
            in_alpha = tuple(toks[1:])
        elif head == "output-alphabet":
            out_alpha = tuple(toks[1:])
        elif head == "state":
            states.update(toks[1:])
        elif head == "initial":
            if len(toks) != 2:
                raise FormatError(f"line {lineno}: initial takes one state")
            initial = toks[1]
        elif head == "accept":
            accepting.extend(toks[1:])
        elif head == "trans":
            if len(toks) != 6 or toks[3] != "/":
                raise FormatError(f"line {lineno}: trans takes SRC READ / WRITE DST")
            read = _word(toks[2], in_alpha, lineno)
            if len(read) > 1:
                raise FormatError(f"line {lineno}: a transition reads at most one symbol")
            write = _word(toks[4], out_alpha, lineno)
            rules.append(FstRule(toks[1], read, write, toks[5]))
            states.update((toks[1], toks[5]))
        else:
            raise FormatError(f"line {lineno}: unknown directive {head!r}")
    if initial is None:
        raise FormatError("missing initial line")
    states.add(initial)
    states.update(accepting)
    try:
        return Fst(states, in_alpha, out_alpha, rules, initial, accepting)
    except ValueError as e:
        raise FormatError(str(e)) from None


def serialize_fst(t: Fst) -> str:
    out = [
        "input-alphabet " + " ".join(t.input_alphabet),
        "output-alphabet " + " ".join(t.output_alphabet),
    ]
    out.extend(f"state {s}" for s in sorted(t.states))
    out.append(f"initial {t.initial}")
    out.extend(f"accept {s}" for s in sorted(t.accepting))
    for r in sorted(t.transitions, key=repr):
        read = "".join(r.read) if r.read else "-"
        write = "".join(r.write) if r.write else "-"
        out.append(f"trans {r.src} {read} / {write} {r.dst}")
    return "\n".join(out) + "\n"
