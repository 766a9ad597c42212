import itertools

import pytest

from sakit.core import (END, Configuration, InRule, NotDeterministic, OutRule,
                        RunVerdict, SetAutomaton, TestRule, WriteRule,
                        extract_run_protocol, initial_configuration,
                        run_dsa, run_nsa_bounded, step, trace_from_certificate,
                        verify_certificate)
from sakit.gallery import build_nonprimes_nsa, build_perk_dsa, is_prime, perk_predicate
from sakit.protocol import parse_protocol, serialize_protocol


def tiny_sa(rules, states, accepting, sigma=("a", "b"), gamma=("x", "y"), end=False):
    return SetAutomaton(states, sigma, gamma, end, rules, "s", accepting)


# --- model validation -------------------------------------------------------

def test_reserved_work_symbols_rejected():
    with pytest.raises(ValueError):
        tiny_sa([], {"s"}, set(), gamma=("#",))
    with pytest.raises(ValueError):
        tiny_sa([], {"s"}, set(), gamma=("in",))


def test_endmarker_rule_needs_flag():
    with pytest.raises(ValueError):
        tiny_sa([WriteRule("s", END, (), "s")], {"s"}, set(), end=False)
    tiny_sa([WriteRule("s", END, (), "s")], {"s"}, set(), end=True)


def test_determinism_check():
    two = tiny_sa([WriteRule("s", "a", (), "s"), InRule("s", "a", "s")], {"s"}, set())
    assert not two.is_deterministic()
    eps_and_sym = tiny_sa([WriteRule("s", None, (), "s"), InRule("s", "a", "s")], {"s"}, set())
    assert not eps_and_sym.is_deterministic()
    ok = tiny_sa([WriteRule("s", "a", ("x",), "t"), TestRule("t", "b", "s", "t")],
                 {"s", "t"}, set())
    assert ok.is_deterministic()


# --- single-step semantics ---------------------------------------------------

def cfg(state, remaining, tape, content):
    return Configuration(state, tuple(remaining), tuple(tape), frozenset(content))


def test_step_in_inserts_tape_and_clears():
    sa = tiny_sa([InRule("s", None, "t")], {"s", "t"}, set(), gamma=("0", "1"))
    c = cfg("s", (), ("0", "1"), set())
    c2 = step(sa, c, sa.transitions[0])
    assert c2.content == {("0", "1")} and c2.tape == ()


def test_step_out_removes_exactly_tape_word():
    sa = tiny_sa([OutRule("s", None, "t")], {"s", "t"}, set(), gamma=("0", "1"))
    c = cfg("s", (), ("0", "1"), {("0", "1"), ("1", "0")})
    c2 = step(sa, c, sa.transitions[0])
    assert c2.content == {("1", "0")} and c2.tape == ()


def test_step_test_branches_on_membership_without_set_change():
    sa = tiny_sa([TestRule("s", None, "p", "m")], {"s", "p", "m"}, set(), gamma=("0", "1"))
    c = cfg("s", (), ("0", "1"), {("1", "0")})
    c2 = step(sa, c, sa.transitions[0])
    assert c2.state == "m" and c2.content == c.content and c2.tape == ()
    c3 = step(sa, cfg("s", (), ("1", "0"), {("1", "0")}), sa.transitions[0])
    assert c3.state == "p"


def test_step_write_appends_and_never_touches_set():
    sa = tiny_sa([WriteRule("s", "a", ("y",), "t")], {"s", "t"}, set())
    c = cfg("s", ("a",), ("x",), {("x",)})
    c2 = step(sa, c, sa.transitions[0])
    assert c2.tape == ("x", "y") and c2.content == c.content and c2.remaining == ()


# --- deterministic runner ----------------------------------------------------

def test_run_dsa_requires_determinism():
    nsa = build_nonprimes_nsa()
    with pytest.raises(NotDeterministic):
        run_dsa(nsa, ())


def test_run_dsa_perk_examples():
    per2 = build_perk_dsa(2)
    assert run_dsa(per2, tuple("01#01#")).verdict is RunVerdict.ACCEPT
    assert run_dsa(per2, tuple("01#10#")).verdict is RunVerdict.REJECT


def test_run_dsa_divergence_write_loop():
    sa = SetAutomaton({"s"}, ("a",), ("x",), False,
                      [WriteRule("s", None, ("x",), "s")], "s", set())
    # tape grows forever: configurations never repeat, so the budget fires
    assert run_dsa(sa, (), budget=50).verdict is RunVerdict.BUDGET_EXCEEDED


def test_run_dsa_divergence_configuration_repeat():
    sa = SetAutomaton({"s", "t"}, ("a",), ("x",), False,
                      [TestRule("s", None, "t", "t"), WriteRule("t", None, ("x",), "s")],
                      "s", set())
    # the test clears the tape each lap, so the configuration repeats
    assert run_dsa(sa, (), budget=10**4).verdict is RunVerdict.REJECT


def test_run_dsa_rejects_on_stuck_with_input():
    per2 = build_perk_dsa(2)
    assert run_dsa(per2, tuple("01")).verdict is RunVerdict.REJECT


def test_trace_records_protocol():
    per2 = build_perk_dsa(2)
    res = run_dsa(per2, tuple("01#01#"))
    proto = extract_run_protocol(res.trace)
    assert serialize_protocol(proto) == "#01#in#01#test+"


def test_extract_protocol_needs_accepting_trace():
    per2 = build_perk_dsa(2)
    res = run_dsa(per2, tuple("01#10#"))
    with pytest.raises(ValueError):
        extract_run_protocol(res.trace)


def test_extract_protocol_empty_when_no_queries():
    sa = SetAutomaton({"s", "f"}, ("a",), ("x",), False,
                      [WriteRule("s", "a", (), "f")], "s", {"f"})
    res = run_dsa(sa, ("a",))
    assert extract_run_protocol(res.trace).blocks == ()


# --- bounded nondeterministic search -----------------------------------------

def test_nsa_bounded_finds_composite_and_misses_prime():
    nsa = build_nonprimes_nsa()
    r4 = run_nsa_bounded(nsa, ("a",) * 4, budget=32)
    assert r4.found
    r3 = run_nsa_bounded(nsa, ("a",) * 3, budget=4096)
    assert not r3.found and r3.exhausted


def test_nsa_bounded_trivial_empty_input():
    sa = SetAutomaton({"s", "f"}, ("a",), ("x",), False,
                      [WriteRule("s", "a", (), "f")], "s", {"f"})
    r = run_nsa_bounded(sa, (), budget=16)
    assert not r.found and r.exhausted


# --- certificates -------------------------------------------------------------

def test_certificate_roundtrip_on_gallery_machines():
    nsa = build_nonprimes_nsa()
    for n in range(0, 7):
        w = ("a",) * n
        r = run_nsa_bounded(nsa, w, budget=64)
        if r.found:
            assert verify_certificate(nsa, w, r.certificate)
            trace = trace_from_certificate(nsa, w, r.certificate)
            assert trace.accepted


def test_certificate_with_disabled_rule_is_false():
    nsa = build_nonprimes_nsa()
    assert not verify_certificate(nsa, ("a",) * 4, ((0, None), (0, None)))
    assert not verify_certificate(nsa, ("a",) * 4, ((999, None),))


def test_handwritten_certificate_for_perk():
    per2 = build_perk_dsa(2)
    w = tuple("01#01#")
    res = run_dsa(per2, w)
    cert = tuple((ts.rule_index, ts.branch) for ts in res.trace.steps)
    assert verify_certificate(per2, w, cert)
    # recorded branch must match reality
    wrong = tuple((i, "-" if b == "+" else b) for i, b in cert)
    assert not verify_certificate(per2, w, wrong)


def test_initial_configuration_appends_endmarker():
    per2 = build_perk_dsa(2)
    c = initial_configuration(per2, tuple("0#"))
    assert c.remaining == ("0", "#", END)
