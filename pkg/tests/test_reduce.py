import random

import pytest

from anonpal.fixtures import load_figure
from anonpal.generators import random_formula, random_model
from anonpal.reduce import (
    EPISTEMIC_NODES, SAFE_NODES, ReductionError, eliminate_safe, reduce_anon, reduce_pal,
    reduce_sai, uses_only,
)
from anonpal.semantics import extension
from anonpal.syntax import Safe, parse_formula, print_formula, subformulas

ABC = ("a", "b", "c")


def text(f):
    return print_formula(f)


def test_eliminate_safe_examples():
    assert text(eliminate_safe(parse_formula("safe p"))) == "~[safeanon p] false"
    assert eliminate_safe(parse_formula("p & q")) == parse_formula("p & q")
    assert text(eliminate_safe(parse_formula("safe safe p"))) == "~[safeanon ~[safeanon p] false] false"


def test_reduce_pal_examples():
    assert text(reduce_pal(parse_formula("[!p] K{a} q"))) == "p -> K{a}(p -> q)"
    assert text(reduce_pal(parse_formula("[!p] q"))) == "p -> q"
    with pytest.raises(ReductionError, match="common knowledge not reducible in PAL fragment"):
        reduce_pal(parse_formula("[!p] C{a,b} q"))


def test_reduce_anon_examples():
    assert text(reduce_anon(parse_formula("[anon p] q"), ABC)) == \
        "(K{a} p -> q) & (K{b} p -> q) & (K{c} p -> q)"
    assert text(reduce_anon(parse_formula("[anon p] false"), ABC)) == "~K{a} p & ~K{b} p & ~K{c} p"
    assert reduce_anon(parse_formula("q"), ABC) == parse_formula("q")


def test_reduce_sai_examples():
    f = reduce_sai(parse_formula("[safeanon p] q"), ABC)
    assert text(f) == "(K{a} safe p -> q) & (K{b} safe p -> q) & (K{c} safe p -> q)"
    assert text(reduce_sai(parse_formula("[safeanon p] false"), ABC)) == \
        "~K{a} safe p & ~K{b} safe p & ~K{c} safe p"
    assert reduce_sai(parse_formula("K{a} p"), ABC) == parse_formula("K{a} p")


def test_reduce_sai_certified_on_fig4():
    m, _ = load_figure("fig4")
    f = parse_formula("[safeanon p] q")
    g = reduce_sai(f, m.agents)
    assert extension(m, f) == extension(m, g)
    assert {"v", "s"} <= set(m.names(extension(m, g)))


def test_nested_safe_body_rejected():
    with pytest.raises(ReductionError, match="nested in the body"):
        reduce_sai(parse_formula("[safeanon p] [safeanon q] r"), ABC)
    with pytest.raises(ReductionError):
        reduce_sai(parse_formula("[safeanon p] safe q"), ABC)
    with pytest.raises(ReductionError):
        reduce_anon(parse_formula("[safeanon p] q"), ABC)


def test_nested_safe_in_announcement_is_fine():
    f = parse_formula("[safeanon [safeanon p] K{a} q] K{b} p")
    g = reduce_sai(f, ABC)
    assert uses_only(g, SAFE_NODES)
    for seed in range(50):
        m = random_model(seed, 4, 3, 2)
        assert extension(m, f) == extension(m, g)


def _sound(reducer, fragment, target, samples=150):
    rng = random.Random(fragment)
    for seed in range(samples):
        m = random_model(rng, rng.randint(1, 5), rng.randint(3, 4), 2)
        f = random_formula(rng, 3, fragment, m.agents, ("p", "q"))
        g = reducer(f, m.agents)
        assert target(g), (seed, text(f))
        assert extension(m, f) == extension(m, g), (seed, text(f))


def test_pal_soundness():
    _sound(lambda f, _: reduce_pal(f), "pal", lambda g: uses_only(g, EPISTEMIC_NODES))


def test_anon_soundness():
    _sound(reduce_anon, "anon", lambda g: uses_only(g, EPISTEMIC_NODES))


def test_sai_soundness():
    _sound(reduce_sai, "sai", lambda g: uses_only(g, SAFE_NODES))


def test_elimination_soundness():
    _sound(lambda f, _: eliminate_safe(f), "full",
           lambda g: not any(isinstance(h, Safe) for h in subformulas(g)))


def test_sai_elim_sai_pipeline():
    from anonpal.syntax import Bot, SafeAnonBox
    for seed in range(80):
        m = random_model(seed, 1 + seed % 5, 3, 2)
        f = random_formula(seed, 3, "sai", m.agents)
        first = reduce_sai(f, m.agents)
        middle = eliminate_safe(first)
        # every remaining box is a ▲ encoding with a false body
        assert all(isinstance(h.body, Bot)
                   for h in subformulas(middle) if isinstance(h, SafeAnonBox))
        last = reduce_sai(middle, m.agents)
        assert uses_only(last, SAFE_NODES)
        assert extension(m, last) == extension(m, f)
