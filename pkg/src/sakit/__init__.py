"""Set-automaton toolkit.

A set automaton is a one-way finite automaton with an auxiliary set of
work-tape words, accessed through insert/remove/test operations that erase
the tape.  The package provides the exact step semantics and runners, the
protocol view of runs, extractor transducers and the protocol-language
composition, an exact emptiness decision, normal forms, example machines and
reductions, and a CLI over textual machine formats.
"""

from .automata import (Fst, FstRule, Nfa, fst_apply, fst_inverse, fst_range,
                       iter_words, nfa_accepts, nfa_complement,
                       nfa_count_at_least, nfa_emptiness, nfa_product,
                       tokenize)
from .cone import build_extractor, cone_generate, member_via_protocols
from .core import (Configuration, InRule, OutRule, RunVerdict, SetAutomaton,
                   TestRule, WriteRule, extract_run_protocol, run_dsa,
                   run_nsa_bounded, step, verify_certificate)
from .emptiness import (ElementaryType, QueryLanguageFamily, QueryTriple,
                        SetAbstraction, TypedProtocol, brute_force_nrr,
                        classify_small_large, elementary_at_least_two,
                        elementary_nonempty, extract_query_languages,
                        nrr_decide, sa_emptiness, shuffle_at_least_two,
                        transform_bound_set, transform_unique_per_type)
from .normalform import (eps_graph_acyclic, normalize_requirements,
                         remove_eps_loops, to_anf)
from .protocol import (Protocol, QueryBlock, build_mprot, check_correct,
                       parse_protocol, replay_correct, serialize_protocol)

__version__ = "0.1.0"
