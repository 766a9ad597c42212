import itertools

import pytest

from sakit.automata import (Fst, FstRule, fst_apply, nfa_accepts,
                            nfa_language, fst_range)
from sakit.cone import NotNormalized, build_extractor, cone_generate, member_via_protocols
from sakit.core import (InRule, RunVerdict, SetAutomaton, WriteRule, run_dsa,
                        run_nsa_bounded, trace_from_certificate,
                        extract_run_protocol)
from sakit.gallery import build_nonprimes_nsa, build_perk_dsa, is_prime
from sakit.normalform import normalize_requirements
from sakit.protocol import protocol_alphabet, serialize_protocol


def one_query_nsa():
    """Accepts exactly {c}: copy nothing, write 'a', insert on the last letter."""
    return SetAutomaton(
        {"s", "t", "f"}, ("c",), ("a", "b"), False,
        [WriteRule("s", "c", ("a",), "t"), InRule("t", None, "f")],
        "s", {"f"})


def test_extractor_requires_normalized_machine():
    with pytest.raises(NotNormalized):
        build_extractor(build_perk_dsa(2))


def test_extractor_of_one_query_machine():
    t = build_extractor(one_query_nsa())
    out = fst_apply(t, ("c",))
    assert nfa_language(out, 4) == {("#", "a", "#", "in")}
    assert nfa_language(fst_apply(t, ()), 4) == set()


def test_extractor_without_queries_has_empty_outputs():
    sa = SetAutomaton({"s", "f"}, ("c",), ("a", "b"), False,
                      [WriteRule("s", "c", ("a",), "f")], "s", set())
    t = build_extractor(sa)
    assert nfa_language(fst_apply(t, ("c",)), 5) == set()


def test_extractor_outputs_match_run_protocols_for_perk():
    per2 = normalize_requirements(build_perk_dsa(2))
    t = build_extractor(per2)
    dsa = build_perk_dsa(2)
    for n in range(0, 6):
        for w in itertools.product(("0", "1", "#"), repeat=n):
            res = run_dsa(dsa, w)
            if res.verdict is not RunVerdict.ACCEPT:
                continue
            # every accepting run of the normalized machine leaves its protocol
            # in the extractor's output language for w
            r = run_nsa_bounded(per2, w, budget=256)
            assert r.found
            proto = extract_run_protocol(trace_from_certificate(per2, w, r.certificate))
            out = fst_apply(t, w)
            assert nfa_accepts(out, proto.word()), (w, serialize_protocol(proto))


def test_member_via_protocols_nonprimes_examples():
    nsa = build_nonprimes_nsa()
    assert member_via_protocols(nsa, ("a",) * 4)
    assert not member_via_protocols(nsa, ("a",) * 5)


def test_member_via_protocols_agrees_with_bounded_search():
    nsa = build_nonprimes_nsa()
    for n in range(0, 10):
        w = ("a",) * n
        r = run_nsa_bounded(nsa, w, budget=4096)
        assert r.found or r.exhausted
        assert member_via_protocols(nsa, w) == r.found


def test_member_via_protocols_agrees_with_run_dsa_perk():
    per2 = build_perk_dsa(2)
    for n in range(0, 7):
        for w in itertools.product(("0", "1", "#"), repeat=n):
            direct = run_dsa(per2, w).verdict is RunVerdict.ACCEPT
            assert member_via_protocols(per2, w) == direct, w


# --- cone composition -----------------------------------------------------------

def constant_output_fst(symbols, sigma=("c",)):
    return Fst({"s", "f"}, sigma, protocol_alphabet(("a", "b")),
               [FstRule("s", (x,), (), "s") for x in sigma]
               + [FstRule("s", (), tuple(symbols), "f")],
               "s", {"f"})


def test_cone_of_constant_correct_protocol_accepts_everything():
    t = constant_output_fst(("#", "a", "#", "in", "#", "a", "#", "test+"))
    m = cone_generate(t)
    for n in range(0, 5):
        r = run_nsa_bounded(m, ("c",) * n, budget=64)
        assert r.found


def test_cone_of_constant_incorrect_protocol_accepts_nothing():
    t = constant_output_fst(("#", "a", "#", "test+"))
    m = cone_generate(t)
    for n in range(0, 5):
        r = run_nsa_bounded(m, ("c",) * n, budget=64)
        assert not r.found and r.exhausted


def test_cone_roundtrip_one_query():
    sa = one_query_nsa()
    m = cone_generate(build_extractor(sa))
    for n in range(0, 5):
        w = ("c",) * n
        r = run_nsa_bounded(m, w, budget=64)
        assert r.found or r.exhausted
        assert r.found == (n == 1)


def test_cone_roundtrip_nonprimes():
    nsa = build_nonprimes_nsa()
    m = cone_generate(build_extractor(normalize_requirements(nsa)))
    for n in range(0, 6):
        w = ("a",) * n
        r = run_nsa_bounded(m, w, budget=256)
        assert r.found or r.exhausted
        assert r.found == member_via_protocols(nsa, w)
