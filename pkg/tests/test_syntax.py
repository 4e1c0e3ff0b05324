import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anonpal.generators import random_formula
from anonpal.syntax import (
    TOP, AnonBox, AnonByBox, And, Atom, CommonKnows, EveryoneKnows, FormulaSyntaxError, Iff,
    Implies, Knows, Not, Or, PublicBox, Safe, SafeAnonBox, agents_of, is_dynamic_free,
    parse_formula, possible, print_formula,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")


def test_parse_anon_box():
    assert parse_formula("[anon p] ~K{b} q") == AnonBox(p, Not(Knows("b", q)))


def test_parse_safe_implies_everyone():
    f = parse_formula("safe p -> E{a,b,c} p")
    assert f == Implies(Safe(p), EveryoneKnows(("a", "b", "c"), p))


def test_trailing_operator_position():
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula("K{d} p &")
    assert info.value.position == 7


@pytest.mark.parametrize("text,pos", [("", 0), ("(p", 2), ("p q", 2), ("[? p] q", 1), ("p $", 2)])
def test_error_offsets(text, pos):
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula(text)
    assert info.value.position == pos


def test_roster_is_checked():
    with pytest.raises(FormulaSyntaxError, match="unknown agent"):
        parse_formula("K{z} p", ["a", "b"])


def test_precedence_and_associativity():
    assert parse_formula("p | q & r") == Or(p, And(q, r))
    assert parse_formula("p -> q -> r") == Implies(p, Implies(q, r))
    assert parse_formula("p <-> q <-> r") == Iff(Iff(p, q), r)
    assert parse_formula("~p & q") == And(Not(p), q)
    assert parse_formula("K{a} p & q") == And(Knows("a", p), q)
    assert parse_formula("[!p] q -> r") == Implies(PublicBox(p, q), r)


def test_all_box_forms():
    assert parse_formula("[anonby b: p] q") == AnonByBox("b", p, q)
    assert parse_formula("[safeanon p & q] r") == SafeAnonBox(And(p, q), r)
    assert parse_formula("C{b,a,a} true") == CommonKnows(("a", "b"), TOP)


@pytest.mark.parametrize("f,text", [
    (AnonBox(p, Knows("a", r)), "[anon p] K{a} r"),
    (Safe(And(p, q)), "safe (p & q)"),
    (possible("a", p), "~K{a} ~p"),
    (Knows("a", Implies(p, q)), "K{a}(p -> q)"),
    (Not(SafeAnonBox(p, Not(TOP))), "~[safeanon p] ~true"),
    (Implies(Implies(p, q), r), "(p -> q) -> r"),
    (Or(p, Or(q, r)), "p | (q | r)"),
])
def test_print(f, text):
    assert print_formula(f) == text
    assert parse_formula(text) == f


def test_agents_and_dynamic():
    f = parse_formula("[anonby c: K{a} p] E{b,d} q")
    assert agents_of(f) == {"a", "b", "c", "d"}
    assert not is_dynamic_free(f)
    assert is_dynamic_free(parse_formula("safe K{a} p"))


def test_empty_group_rejected():
    with pytest.raises(ValueError):
        EveryoneKnows((), p)


@pytest.mark.parametrize("fragment", ["static", "full", "sai"])
def test_round_trip_random(fragment):
    for seed in range(100):
        f = random_formula(seed, 4, fragment, ("a", "b", "c", "d"), ("p", "q", "r"))
        assert parse_formula(print_formula(f)) == f


atoms = st.sampled_from(["p", "q", "r", "true", "false"]).map(parse_formula)
agents = st.sampled_from(["a", "b", "c"])


def _extend(children):
    return st.one_of(
        children.map(Not),
        st.tuples(children, children).map(lambda t: And(*t)),
        st.tuples(children, children).map(lambda t: Or(*t)),
        st.tuples(children, children).map(lambda t: Implies(*t)),
        st.tuples(children, children).map(lambda t: Iff(*t)),
        st.tuples(agents, children).map(lambda t: Knows(*t)),
        st.tuples(st.sets(agents, min_size=1), children).map(lambda t: CommonKnows(tuple(t[0]), t[1])),
        children.map(Safe),
        st.tuples(children, children).map(lambda t: PublicBox(*t)),
        st.tuples(agents, children, children).map(lambda t: AnonByBox(*t)),
        st.tuples(children, children).map(lambda t: SafeAnonBox(*t)),
    )


@settings(max_examples=300, deadline=None)
@given(st.recursive(atoms, _extend, max_leaves=12))
def test_round_trip_hypothesis(f):
    text = print_formula(f)
    assert parse_formula(text) == f
    assert print_formula(parse_formula(text)) == text
