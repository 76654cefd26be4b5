import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import AP, FORMULAS
from sabpi.ltlf import (
    Dfa,
    LtlfSyntaxError,
    StateBudgetExceeded,
    UndeclaredAtomError,
    compile_dfa,
    compile_text,
    is_core,
    normalize,
    parse_ltlf,
    satisfies,
    satisfies_batch,
)
from sabpi.ltlf.formula import And, Atom, Eventually, Globally, Implies


def words(ap, max_len):
    letters = [frozenset(s) for r in range(len(ap) + 1) for s in itertools.combinations(ap, r)]
    for n in range(1, max_len + 1):
        yield from itertools.product(letters, repeat=n)


# ---------------------------------------------------------------- parsing
def test_parse_eventually():
    assert parse_ltlf("F(key)", ["key"]) == Eventually(Atom("key"))


def test_parse_rock_sample_task():
    f = parse_ltlf("G(fuel) & F(sample -> good)", ["fuel", "sample", "good"])
    assert f == And(Globally(Atom("fuel")), Eventually(Implies(Atom("sample"), Atom("good"))))


def test_unbalanced_parenthesis_reports_offset():
    with pytest.raises(LtlfSyntaxError) as err:
        parse_ltlf("F(doo", ["doo"])
    assert err.value.position == 5


def test_undeclared_atom_is_named():
    with pytest.raises(UndeclaredAtomError) as err:
        parse_ltlf("F(door) & F(key)", ["door"])
    assert err.value.name == "key"


def test_precedence_and_associativity():
    # & binds tighter than |, which binds tighter than ->; -> and U are right-associative
    assert parse_ltlf("a | b & c", AP) == parse_ltlf("a | (b & c)", AP)
    assert parse_ltlf("a -> b -> c", AP) == parse_ltlf("a -> (b -> c)", AP)
    assert parse_ltlf("a U b U c", AP) == parse_ltlf("a U (b U c)", AP)
    assert parse_ltlf("!a U b", AP) == parse_ltlf("(!a) U b", AP)


@pytest.mark.parametrize("text", FORMULAS)
def test_normalize_reaches_core_grammar(text):
    assert is_core(normalize(parse_ltlf(text, AP)))


# ------------------------------------------------------------ compilation
def test_eventually_automaton():
    d = compile_text("F(p)", ["p"])
    assert d.n_states == 2
    assert d.table.tolist() == [[0, 1], [1, 1]]
    assert d.accepting == {1} and d.trap == frozenset()
    assert d.step(0, d.symbol({"p"})) == 1
    assert d.step(1, d.symbol(set())) == 1
    assert d.accepts([set(), set(), {"p"}])
    assert not d.accepts([set(), set()])


def test_safety_reach_automaton_traps_on_obstacle():
    d = compile_text("G(!obs) & F(exit)", ["obs", "exit"])
    assert d.n_states == 3
    (trap,) = d.trap
    for sym in range(4):
        if sym & d.symbol({"obs"}):
            assert d.step(0, sym) == trap
    for word in words(("obs", "exit"), 4):
        f = parse_ltlf("G(!obs) & F(exit)", ["obs", "exit"])
        assert d.accepts(word) == satisfies(word, f)


def test_false_is_a_single_trap():
    d = compile_text("false", ["p"])
    assert d.n_states == 1
    assert d.accepting == frozenset() and d.trap == {0}


@pytest.mark.parametrize(
    "text, n_states",
    [("a", 3), ("true", 2), ("G a", 3), ("a U b", 3), ("F a & F b", 4), ("F G a", 2), ("X X b", 5)],
)
def test_state_counts(text, n_states):
    assert compile_text(text, AP).n_states == n_states


@pytest.mark.parametrize("text", FORMULAS)
def test_language_matches_semantics_up_to_length_4(text):
    f = parse_ltlf(text, AP)
    d = compile_dfa(f, AP)
    for word in words(AP, 4):
        assert d.accepts(word) == satisfies(word, f), (text, word)


def _equivalent_classes(d: Dfa):
    """Moore partition refinement from {accepting, rest} to a fixpoint."""
    cls = [int(d.is_accepting(q)) for q in range(d.n_states)]
    while True:
        sig = [(cls[q], tuple(cls[t] for t in d.table[q])) for q in range(d.n_states)]
        ids = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [ids[s] for s in sig]
        if len(set(new)) == len(set(cls)):
            return new
        cls = new


@pytest.mark.parametrize("text", FORMULAS)
def test_minimal(text):
    d = compile_text(text, AP)
    assert len(set(_equivalent_classes(d))) == d.n_states


@pytest.mark.parametrize("text", FORMULAS)
def test_traps_are_closed_and_never_accept(text):
    d = compile_text(text, AP)
    assert not (d.trap & d.accepting)
    for q in d.trap:
        assert all(t in d.trap for t in d.table[q])
        for word in words(AP, min(d.n_states, 3)):
            assert not d.is_accepting(d.run(word, q))


def test_all_states_reachable_and_total():
    for text in FORMULAS:
        d = compile_text(text, AP)
        assert d.table.shape == (d.n_states, 8)
        seen, stack = {d.initial}, [d.initial]
        while stack:
            for t in d.table[stack.pop()]:
                if int(t) not in seen:
                    seen.add(int(t))
                    stack.append(int(t))
        assert seen == set(range(d.n_states))


def test_state_budget():
    with pytest.raises(StateBudgetExceeded):
        compile_text("X X X X a", AP, state_budget=3)


def test_json_round_trip_and_dot():
    d = compile_text("!obs U exit", ["obs", "exit"])
    again = Dfa.from_json(json.loads(json.dumps(d.to_json())))
    assert np.array_equal(again.table, d.table)
    assert again.accepting == d.accepting and again.trap == d.trap
    dot = d.to_dot()
    assert dot.startswith("digraph") and "doublecircle" in dot


# ------------------------------------------------------------- properties
_atoms = st.sampled_from([Atom(p) for p in AP])


def _formulas():
    from sabpi.ltlf.formula import Next, Not, Or, Until

    return st.recursive(
        _atoms,
        lambda sub: st.one_of(
            sub.map(Not),
            sub.map(Next),
            sub.map(Eventually),
            sub.map(Globally),
            st.tuples(sub, sub).map(lambda t: And(*t)),
            st.tuples(sub, sub).map(lambda t: Or(*t)),
            st.tuples(sub, sub).map(lambda t: Until(*t)),
        ),
        max_leaves=5,
    )


_letters = st.frozensets(st.sampled_from(AP))


@settings(max_examples=150, deadline=None)
@given(_formulas(), st.lists(_letters, min_size=1, max_size=7))
def test_random_formulas_agree_with_semantics(f, word):
    assert compile_dfa(f, AP).accepts(word) == satisfies(word, f)


@pytest.mark.parametrize("text", FORMULAS)
def test_batched_evaluators_agree_with_the_scalar_ones(text):
    f = parse_ltlf(text, AP)
    d = compile_dfa(f, AP)
    for n in range(1, 5):
        syms = np.array(list(itertools.product(range(1 << len(AP)), repeat=n)))
        letters = [[d.props(int(s)) for s in row] for row in syms]
        assert satisfies_batch(syms, AP, f).tolist() == [satisfies(w, f) for w in letters]
        assert d.accepts_batch(syms).tolist() == [d.accepts(w) for w in letters]
