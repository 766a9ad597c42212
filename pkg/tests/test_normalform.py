import itertools

import pytest

from sakit.core import (END, InRule, NotDeterministic, OutRule, RunVerdict,
                        SetAutomaton, TestRule, WriteRule, run_dsa,
                        run_nsa_bounded)
from sakit.gallery import build_nonprimes_nsa, build_perk_dsa
from sakit.normalform import (accepts_only_after_operation, eps_graph_acyclic,
                              eps_segment_words, is_normalized,
                              normalize_requirements, remove_eps_loops, to_anf)


def exhaustive_equal(sa1, sa2, sigma, max_len, budget=4096):
    """Language equality up to max_len, deciding each side exactly."""
    for n in range(max_len + 1):
        for w in itertools.product(sigma, repeat=n):
            a1 = _accepted(sa1, w, budget)
            a2 = _accepted(sa2, w, budget)
            assert a1 == a2, (w, a1, a2)


def _accepted(sa, w, budget):
    if sa.is_deterministic():
        res = run_dsa(sa, w, budget=budget)
        assert res.verdict is not RunVerdict.BUDGET_EXCEEDED
        return res.verdict is RunVerdict.ACCEPT
    r = run_nsa_bounded(sa, w, budget=budget)
    assert r.found or r.exhausted
    return r.found


# --- requirements normalization -----------------------------------------------

def test_already_normalized_is_unchanged():
    m = build_nonprimes_nsa()
    m2 = normalize_requirements(m)
    m3 = normalize_requirements(m2)
    assert is_normalized(m2)
    assert m3 == m2


def test_perk_normalization_equivalent_up_to_8():
    per2 = build_perk_dsa(2)
    m = normalize_requirements(per2)
    assert is_normalized(m)
    assert not m.uses_endmarker and set(m.work_alphabet) == {"a", "b"}
    exhaustive_equal(per2, m, ("0", "1", "#"), 8)


def test_three_letter_alphabet_uses_letter_codes():
    # set words in runs of the normalized machine are code concatenations
    sa = SetAutomaton(
        {"s", "t", "f"}, ("a",), ("x", "y", "z"), False,
        [WriteRule("s", "a", ("x", "z"), "t"), InRule("t", None, "f")],
        "s", {"f"})
    m = normalize_requirements(sa)
    r = run_nsa_bounded(m, ("a",), budget=64)
    assert r.found
    from sakit.core import trace_from_certificate
    trace = trace_from_certificate(m, ("a",), r.certificate)
    words = [ts.query_word for ts in trace.steps if ts.query_word is not None]
    # x is letter 1, z letter 3: b a b . b a a a b
    assert ("b", "a", "b", "b", "a", "a", "a", "b") in words


def test_normalized_accepts_only_after_operation():
    for sa in (build_perk_dsa(2), build_perk_dsa(3), build_nonprimes_nsa()):
        assert accepts_only_after_operation(normalize_requirements(sa))


# --- action normal form ---------------------------------------------------------

def test_anf_preserves_language_and_determinism():
    per2 = build_perk_dsa(2)
    anf = to_anf(per2)
    assert anf.is_deterministic()
    exhaustive_equal(per2, anf, ("0", "1", "#"), 6)


def test_anf_splits_mixed_entry_marks():
    # state "t" entered both by a write and by a test branch
    sa = SetAutomaton(
        {"s", "t"}, ("a", "b"), ("x",), False,
        [WriteRule("s", "a", (), "t"), TestRule("s", "b", "t", "s"),
         WriteRule("t", "a", (), "s")],
        "s", {"t"})
    anf = to_anf(sa)
    marks = {st.rsplit("|", 1)[1] for st in anf.states if st.startswith("t|")}
    assert {"w", "t+"} <= marks
    exhaustive_equal(sa, anf, ("a", "b"), 6)


def test_anf_initial_state_has_no_incoming():
    per2 = build_perk_dsa(2)
    anf = to_anf(per2)
    for r in anf.transitions:
        targets = (r.dst_plus, r.dst_minus) if isinstance(r, TestRule) else (r.dst,)
        assert anf.initial not in targets


def test_anf_on_uniform_machine_is_isomorphic_in_size():
    # all states already entered by one mark each and initial has no incoming
    sa = SetAutomaton(
        {"s", "t", "f"}, ("a",), ("x",), False,
        [WriteRule("s", "a", ("x",), "t"), InRule("t", "a", "f")],
        "s", {"f"})
    anf = to_anf(sa)
    assert len(anf.states) == len(sa.states)


# --- empty-move loop removal ------------------------------------------------------

def loop_machine_marker_exit():
    """Query-carrying loop that terminates once the marker word is inserted."""
    return SetAutomaton(
        {"s", "p", "t", "pi", "pi2", "f", "g"},
        ("a", "b"), ("x", "y"), False,
        [WriteRule("s", "a", (), "p"),
         WriteRule("p", None, ("x",), "t"),
         TestRule("t", None, "f", "pi"),
         WriteRule("pi", None, ("x",), "pi2"),
         InRule("pi2", None, "p"),
         WriteRule("f", "b", (), "g")],
        "s", {"g"})


def test_no_eps_machine_unchanged():
    per2 = build_perk_dsa(2)
    assert remove_eps_loops(per2) is per2


def test_requires_determinism():
    with pytest.raises(NotDeterministic):
        remove_eps_loops(build_nonprimes_nsa())


def test_write_only_cycle_removed_and_equivalent():
    sa = SetAutomaton(
        {"s", "loop", "f"}, ("c",), ("x",), False,
        [WriteRule("s", "c", (), "loop"), WriteRule("loop", None, ("x",), "loop")],
        "s", {"f"})
    out = remove_eps_loops(sa)
    assert eps_graph_acyclic(out)
    assert run_dsa(sa, ("c",), budget=64).verdict is RunVerdict.BUDGET_EXCEEDED
    assert run_dsa(out, ("c",), budget=10**4).verdict is RunVerdict.REJECT


def test_query_loop_machine_equivalent():
    sa = loop_machine_marker_exit()
    out = remove_eps_loops(sa)
    assert eps_graph_acyclic(out) and out.is_deterministic()
    exhaustive_equal(sa, out, ("a", "b"), 8, budget=10**4)


def test_segment_words_are_finite_and_expected():
    sa = loop_machine_marker_exit()
    assert eps_segment_words(sa) == (("x",),)


def test_vector_tracks_membership_cosimulation():
    """In every reachable configuration of the rebuilt machine, bit i is set
    exactly when tracked word i is in the set."""
    from sakit.core import initial_configuration, rule_enabled, step

    sa = loop_machine_marker_exit()
    tracked = eps_segment_words(sa)
    out = remove_eps_loops(sa)

    def vector_of(state_name):
        # plain states are named "<orig>|<bits>|<aux>"; chain states carry |c<k>
        parts = state_name.split("|")
        if len(parts) < 3 or parts[-1].startswith("c"):
            return None
        bits = parts[-2]
        if not set(bits) <= {"0", "1"}:
            return None
        return [b == "1" for b in bits]

    for n in range(0, 7):
        for w in itertools.product(("a", "b"), repeat=n):
            c = initial_configuration(out, w)
            for _ in range(10**4):
                vec = vector_of(c.state)
                if vec is not None:
                    for i, u in enumerate(tracked):
                        assert vec[i] == (u in c.content), (w, c)
                enabled = [r for r in out.transitions if rule_enabled(out, c, r)]
                if not enabled:
                    break
                assert len(enabled) == 1
                c = step(out, c, enabled[0])
