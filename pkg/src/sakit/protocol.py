"""Protocols: the query-block record of a run's set operations.

A protocol is the word #u1#op1#u2#op2...#un#opn over the work alphabet plus
the delimiter and the four operation tokens; blocks are identified by
position, so distinct occurrences of the same block text are distinct.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .automata import Word, tokenize
from .core import HASH, OPS, InRule, OutRule, SetAutomaton, TestRule, WriteRule

DEFAULT_GAMMA = ("a", "b")


class ProtocolFormatError(ValueError):
    pass


@dataclass(frozen=True)
class QueryBlock:
    query_word: Word
    op: str                 # 'in' | 'out' | 'test+' | 'test-'
    position: int           # consecutive from 0

    def __post_init__(self):
        if self.op not in OPS:
            raise ProtocolFormatError(f"unknown operation token {self.op!r}")


@dataclass(frozen=True)
class Protocol:
    blocks: tuple[QueryBlock, ...]
    gamma: tuple[str, ...] = DEFAULT_GAMMA

    def __init__(self, blocks, gamma=DEFAULT_GAMMA):
        object.__setattr__(self, "blocks", tuple(blocks))
        object.__setattr__(self, "gamma", tuple(gamma))
        gset = set(self.gamma)
        for i, b in enumerate(self.blocks):
            if b.position != i:
                raise ProtocolFormatError("block positions must be consecutive from 0")
            if any(s not in gset for s in b.query_word):
                raise ProtocolFormatError(f"query word {b.query_word} outside work alphabet")

    def __len__(self):
        return len(self.blocks)

    def word(self) -> Word:
        """The protocol as a word over the protocol alphabet."""
        out: list[str] = []
        for b in self.blocks:
            out.append(HASH)
            out.extend(b.query_word)
            out.append(HASH)
            out.append(b.op)
        return tuple(out)


def protocol_alphabet(gamma) -> tuple[str, ...]:
    return tuple(gamma) + (HASH,) + OPS


def serialize_protocol(p: Protocol) -> str:
    return "".join(p.word())


def parse_protocol(text: str, gamma=DEFAULT_GAMMA) -> Protocol:
    """Parse `#word#op` blocks; the text must end with an operation token.

    Rejects malformed text: missing delimiters, unknown operation tokens,
    symbols outside the work alphabet, and trailing delimiters.
    """
    if not text.startswith(HASH):
        raise ProtocolFormatError("protocol must start with '#'")
    parts = text.split(HASH)
    # parts[0] is the empty prefix before the leading '#'
    if parts[0] != "":
        raise ProtocolFormatError("protocol must start with '#'")
    body = parts[1:]
    if not body or len(body) % 2 != 0:
        raise ProtocolFormatError("protocol must be a sequence of #word#op blocks")
    blocks = []
    for i in range(0, len(body), 2):
        raw_word, op = body[i], body[i + 1]
        if op not in OPS:
            raise ProtocolFormatError(f"unknown or misplaced operation token {op!r}")
        try:
            word = tokenize(raw_word, gamma) if raw_word else ()
        except ValueError as e:
            raise ProtocolFormatError(str(e)) from None
        blocks.append(QueryBlock(word, op, len(blocks)))
    return Protocol(tuple(blocks), gamma)


def check_correct(p: Protocol) -> Optional[int]:
    """None when the protocol is correct, else the minimal violating position.

    A test+ block must be supported by the most recent in/out block carrying
    the same query word being an insertion; a test- block must either be
    supported by a removal or be standalone (no earlier in/out on its word).
    """
    last: dict[Word, str] = {}
    for b in p.blocks:
        if b.op in ("in", "out"):
            last[b.query_word] = b.op
        elif b.op == "test+":
            if last.get(b.query_word) != "in":
                return b.position
        else:  # test-
            if last.get(b.query_word, "out") != "out":
                return b.position
    return None


def replay_correct(p: Protocol) -> bool:
    """Simulate the set directly; True iff every recorded test result matches."""
    content: set[Word] = set()
    for b in p.blocks:
        if b.op == "in":
            content.add(b.query_word)
        elif b.op == "out":
            content.discard(b.query_word)
        elif b.op == "test+":
            if b.query_word not in content:
                return False
        else:
            if b.query_word in content:
                return False
    return True


def replay_contents(p: Protocol) -> list[frozenset[Word]]:
    """Set contents after each block (without checking test consistency)."""
    content: set[Word] = set()
    out = []
    for b in p.blocks:
        if b.op == "in":
            content.add(b.query_word)
        elif b.op == "out":
            content.discard(b.query_word)
        out.append(frozenset(content))
    return out


def build_mprot(gamma=DEFAULT_GAMMA) -> SetAutomaton:
    """Deterministic machine accepting exactly the correct protocols over gamma.

    It copies each query word to the work tape, performs the operation named
    by the following token, and on tests dead-ends when the actual outcome
    contradicts the token; malformed words get stuck structurally.
    """
    gamma = tuple(gamma)
    sigma = protocol_alphabet(gamma)
    rules = [WriteRule("start", HASH, (), "word")]
    for g in gamma:
        rules.append(WriteRule("word", g, (g,), "word"))
    rules.append(WriteRule("word", HASH, (), "op"))
    rules.append(InRule("op", "in", "done"))
    rules.append(OutRule("op", "out", "done"))
    rules.append(TestRule("op", "test+", "done", "dead"))
    rules.append(TestRule("op", "test-", "dead", "done"))
    rules.append(WriteRule("done", HASH, (), "word"))
    return SetAutomaton(
        states={"start", "word", "op", "done", "dead"},
        input_alphabet=sigma,
        work_alphabet=gamma,
        uses_endmarker=False,
        transitions=rules,
        initial="start",
        accepting={"done"},
    )
