import random

import pytest

from anonpal.fixtures import load_figure
from anonpal.generators import random_formula, random_model
from anonpal.model import EpistemicModel, PointedModel
from anonpal.oracles import (
    OracleTooLarge, definable_subsets, induced_anon_update, safe_assignment, safe_iterative,
    search_anon_counterexample, search_public_counterexample,
)
from anonpal.semantics import extension, safe_ext
from anonpal.syntax import is_dynamic_free, parse_formula
from anonpal.updates import anon_update, public_update


def names(model, states):
    return set(model.names(states))


def test_iterative_on_fig4():
    m, _ = load_figure("fig4")
    p = m.truth("p")
    assert names(m, safe_iterative(m, p, 0)) == {"s", "t", "u", "v", "w"}
    assert names(m, safe_iterative(m, p, 1)) == {"t", "u", "v", "w"}
    assert safe_iterative(m, p, m.size) == safe_ext(m, p)


def test_assignment_examples():
    fig4, _ = load_figure("fig4")
    assert names(fig4, safe_assignment(fig4, fig4.truth("p"))) == {"v", "w"}
    fig3, _ = load_figure("fig3")
    assert safe_assignment(fig3, fig3.truth("p")) == frozenset()
    for seed in range(10):
        m = random_model(seed, 4, 3, 1)
        assert safe_assignment(m, m.all_states) == m.all_states


def test_restricted_and_full_domain_agree():
    rng = random.Random(5)
    for seed in range(60):
        m = random_model(seed, rng.randint(1, 5), 3, 1)
        x = frozenset(s for s in range(m.size) if rng.random() < 0.7)
        assert safe_assignment(m, x) == safe_assignment(m, x, full_domain=True)


def test_assignment_guard():
    m = random_model(0, 12, 4, 1)
    with pytest.raises(OracleTooLarge):
        safe_assignment(m, m.all_states)


def test_definable_subsets():
    fig5, _ = load_figure("fig5")
    assert len(definable_subsets(fig5)) == 8
    fig1, _ = load_figure("fig1")
    assert len(definable_subsets(fig1)) == 64
    flat = EpistemicModel(("a",), ("x", "y"), ((0, 0),), {})
    assert definable_subsets(flat) == [frozenset(), frozenset({0, 1})]


def test_definable_subsets_are_unions_of_formula_extensions():
    # every formula extension is one of the definable subsets
    for seed in range(30):
        m = random_model(seed, 5, 3, 2)
        subsets = set(definable_subsets(m))
        for k in range(5):
            f = random_formula(seed * 10 + k, 3, "static", m.agents)
            assert extension(m, f) in subsets


def test_public_search():
    m, point = load_figure("fig1")
    verbose = parse_formula("r & ~K{a}~q & ~K{b}~(K{a}(~q & r)) & K{b} p")
    assert search_public_counterexample(m, point, verbose).impossible
    found = search_public_counterexample(m, point, parse_formula("p"))
    assert m.truth("p") in found.witnesses
    assert search_public_counterexample(m, point, parse_formula("false")).impossible


def test_anon_search():
    fig5, point = load_figure("fig5")
    goal = public_update(fig5, parse_formula("p")).pointed("s")
    assert search_anon_counterexample(fig5, goal).impossible
    assert search_anon_counterexample(fig5, goal, point).impossible

    fig1, _ = load_figure("fig1")
    phi = parse_formula("p")
    upd = anon_update(fig1, phi)
    verdict = search_anon_counterexample(fig1, upd.pointed("(s,a)"))
    assert (extension(fig1, phi), "(s,a)") in verdict.witnesses

    single = EpistemicModel(("a", "b", "c"), ("w",), ((0,),) * 3, {})
    assert not search_anon_counterexample(single, PointedModel(single, 0)).impossible


def test_induced_update_matches_formula_update():
    for seed in range(40):
        m = random_model(seed, 4, 3, 2)
        f = random_formula(seed, 2, "epistemic", m.agents)
        direct = anon_update(m, f)
        induced = induced_anon_update(m, extension(m, f))
        assert direct == induced


def test_random_generators_deterministic():
    assert random_model(42, 6, 4, 3) == random_model(42, 6, 4, 3)
    m = random_model(42, 6, 4, 3)
    assert m.size == 6 and len(m.agents) == 4
    for seed in range(50):
        assert is_dynamic_free(random_formula(seed, 3, "static"))
    assert random_formula(9, 3, "full") == random_formula(9, 3, "full")


def test_iterative_antitone_and_stable():
    for seed in range(50):
        m = random_model(seed, 1 + seed % 6, 3 + seed % 2, 2)
        x = m.truth("p")
        levels = [safe_iterative(m, x, n) for n in range(m.size + 2)]
        assert all(b <= a for a, b in zip(levels, levels[1:]))
        assert levels[m.size] == levels[m.size + 1] == safe_ext(m, x)


def test_definable_subsets_are_bisimulation_closed():
    from anonpal.model import are_bisimilar
    for seed in range(20):
        m = random_model(seed, 5, 3, 1)
        for subset in definable_subsets(m):
            for s in subset:
                for t in range(m.size):
                    if are_bisimilar(PointedModel(m, s), PointedModel(m, t)):
                        assert t in subset
