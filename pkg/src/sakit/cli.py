"""Command-line front end.

Verdicts go to stdout as single stable tokens (ACCEPT/REJECT/EMPTY/NONEMPTY/
CORRECT/INCORRECT) followed by machine-readable payload; diagnostics go to
stderr.  Exit codes: 0 positive answer/success, 1 negative answer, 2 usage or
parse error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import gallery
from .automata import tokenize
from .cone import build_extractor, member_via_protocols
from .core import DEFAULT_BUDGET, RunVerdict, run_dsa, run_nsa_bounded
from .emptiness import nrr_decide, sa_emptiness
from .formats import (FormatError, parse_nfa, parse_sa, serialize_fst,
                      serialize_sa)
from .normalform import normalize_requirements, remove_eps_loops, to_anf
from .protocol import (ProtocolFormatError, check_correct, parse_protocol,
                       serialize_protocol)

EXIT_YES = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e}") from None


def _write_out(text: str, path):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load_sa(path: str):
    try:
        return parse_sa(_read(path))
    except FormatError as e:
        raise CliError(f"{path}: {e}") from None


def _budget(args) -> int:
    if getattr(args, "budget", None) is not None:
        return args.budget
    env = os.environ.get("SAKIT_BUDGET")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"SAKIT_BUDGET must be an integer, got {env!r}") from None
    return DEFAULT_BUDGET


def _tokenize_word(sa, text: str):
    try:
        return tokenize(text, sa.input_alphabet) if text else ()
    except ValueError as e:
        raise CliError(str(e)) from None


def cmd_run(args) -> int:
    sa = _load_sa(args.machine)
    w = _tokenize_word(sa, args.word)
    budget = _budget(args)
    if sa.is_deterministic():
        res = run_dsa(sa, w, budget)
        if args.trace:
            for ts in res.trace.steps:
                print(f"; rule {ts.rule_index} {sa.transitions[ts.rule_index]}"
                      + (f" branch {ts.branch}" if ts.branch else ""), file=sys.stderr)
        if res.verdict is RunVerdict.ACCEPT:
            print("ACCEPT")
            return EXIT_YES
        if res.verdict is RunVerdict.REJECT:
            print("REJECT")
            return EXIT_NO
        print("BUDGET")
        return EXIT_BUDGET
    res = run_nsa_bounded(sa, w, budget)
    if res.found:
        print("ACCEPT " + " ".join(f"{i}{b or ''}" for i, b in res.certificate))
        return EXIT_YES
    if res.exhausted:
        print("REJECT")
        return EXIT_NO
    print("BUDGET")
    return EXIT_BUDGET


def cmd_member(args) -> int:
    sa = _load_sa(args.machine)
    w = _tokenize_word(sa, args.word)
    if args.method == "protocol":
        ok = member_via_protocols(sa, w)
        print("ACCEPT" if ok else "REJECT")
        return EXIT_YES if ok else EXIT_NO
    return cmd_run(argparse.Namespace(machine=args.machine, word=args.word,
                                      budget=getattr(args, "budget", None), trace=False))


def cmd_empty(args) -> int:
    sa = _load_sa(args.machine)
    res = sa_emptiness(sa)
    if res.empty:
        print("EMPTY")
        return EXIT_YES
    print("NONEMPTY " + serialize_protocol(res.witness))
    return EXIT_NO


def cmd_nrr(args) -> int:
    try:
        nfa = parse_nfa(_read(args.automaton))
    except FormatError as e:
        raise CliError(f"{args.automaton}: {e}") from None
    res = nrr_decide(nfa)
    if res.nonempty:
        print("NONEMPTY " + serialize_protocol(res.witness.protocol))
        return EXIT_YES
    print("EMPTY")
    return EXIT_NO


def cmd_protocol(args) -> int:
    if args.action != "check":
        raise CliError(f"unknown protocol action {args.action!r}")
    try:
        p = parse_protocol(args.text)
    except ProtocolFormatError as e:
        raise CliError(str(e))
    bad = check_correct(p)
    if bad is None:
        print("CORRECT")
        return EXIT_YES
    print(f"INCORRECT {bad}")
    return EXIT_NO


def cmd_extract(args) -> int:
    sa = _load_sa(args.machine)
    t = build_extractor(normalize_requirements(sa))
    _write_out(serialize_fst(t), args.output)
    return EXIT_YES


def cmd_normalize(args) -> int:
    sa = _load_sa(args.machine)
    if args.form == "req":
        out = normalize_requirements(sa)
    elif args.form == "anf":
        out = to_anf(sa)
    else:
        out = remove_eps_loops(sa)
    _write_out(serialize_sa(out), args.output)
    return EXIT_YES


def cmd_reduce(args) -> int:
    if args.what == "cvp":
        prog = gallery.parse_cvp(_read(args.source))
        print("".join(gallery.cvp_to_sacvp(prog)))
        return EXIT_YES
    if args.what == "3sat":
        listed, phi = gallery.parse_cnf(_read(args.source))
        print("".join(gallery.threesat_to_sasat(phi)))
        return EXIT_YES
    if args.what == "tm":
        tm = gallery.parse_tm(_read(args.source))
        if args.cells is None:
            raise CliError("reduce tm requires --cells N")
        dsa = gallery.tm_to_unary_dsa(tm, args.cells)
        _write_out(serialize_sa(dsa), args.output)
        return EXIT_YES
    if args.what == "member":
        sa = _load_sa(args.source)
        if args.word is None:
            raise CliError("reduce member requires --word W")
        w = _tokenize_word(sa, args.word)
        out = gallery.membership_to_emptiness(sa, w)
        _write_out(serialize_sa(out), args.output)
        return EXIT_YES
    raise CliError(f"unknown reduction {args.what!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sakit",
                                description="set-automaton toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a machine on a word")
    run.add_argument("machine")
    run.add_argument("--word", required=True)
    run.add_argument("--budget", type=int)
    run.add_argument("--trace", action="store_true")
    run.set_defaults(fn=cmd_run)

    member = sub.add_parser("member", help="decide membership")
    member.add_argument("machine")
    member.add_argument("--word", required=True)
    member.add_argument("--method", choices=("direct", "protocol"), default="direct")
    member.add_argument("--budget", type=int)
    member.set_defaults(fn=cmd_member)

    empty = sub.add_parser("empty", help="decide emptiness (exit 0 iff empty)")
    empty.add_argument("machine")
    empty.set_defaults(fn=cmd_empty)

    nrr = sub.add_parser("nrr", help="does the automaton accept a correct protocol?")
    nrr.add_argument("automaton")
    nrr.set_defaults(fn=cmd_nrr)

    prot = sub.add_parser("protocol", help="protocol utilities")
    prot.add_argument("action", choices=("check",))
    prot.add_argument("text")
    prot.set_defaults(fn=cmd_protocol)

    ext = sub.add_parser("extract", help="emit the protocol extractor of a machine")
    ext.add_argument("machine")
    ext.add_argument("-o", "--output", default="-")
    ext.set_defaults(fn=cmd_extract)

    norm = sub.add_parser("normalize", help="normal-form constructions")
    norm.add_argument("machine")
    norm.add_argument("--form", choices=("req", "anf", "noeps"), required=True)
    norm.add_argument("-o", "--output", default="-")
    norm.set_defaults(fn=cmd_normalize)

    red = sub.add_parser("reduce", help="reductions")
    red.add_argument("what", choices=("cvp", "3sat", "tm", "member"))
    red.add_argument("source")
    red.add_argument("--cells", type=int)
    red.add_argument("--word")
    red.add_argument("-o", "--output", default="-")
    red.set_defaults(fn=cmd_reduce)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0,) else 0
    try:
        return args.fn(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (FormatError, ProtocolFormatError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
