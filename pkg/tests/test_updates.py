import json

import pytest

from anonpal.fixtures import load_figure
from anonpal.generators import random_model
from anonpal.model import ModelError, PointedModel, are_bisimilar, restrict
from anonpal.syntax import BOT, TOP, parse_formula
from anonpal.updates import (
    ActionModel, action_model_to_spec, anon_action_model, anon_update, audit_anonymity,
    build_action_model, load_action_model, product, product_update, public_update,
    safe_anon_update,
)

p = parse_formula("p")


def test_public_update_fig1():
    m, _ = load_figure("fig1")
    assert set(public_update(m, p).states) == {"u", "s", "v", "x"}
    somebody = parse_formula("K{a} p | K{b} p | K{c} p")
    assert set(public_update(m, somebody).states) == {"u", "s", "v"}
    assert public_update(m, BOT) is None


def test_anon_update_fig1():
    m, _ = load_figure("fig1")
    u = anon_update(m, p)
    assert set(u.states) == {"(u,a)", "(s,a)", "(s,c)", "(v,c)"}
    assert len(u.blocks("b")) == 1
    assert u.related("a", u.state_index("(u,a)"), u.state_index("(s,a)"))
    assert not u.related("a", u.state_index("(s,a)"), u.state_index("(s,c)"))


def test_anon_update_fig2():
    m, _ = load_figure("fig2")
    u = anon_update(m, p)
    assert u.states == ("(s,a)", "(s,c)")
    assert u.related("b", 0, 1)


def test_anon_update_inapplicable():
    m = random_model(1, 3, 3, 1)
    assert anon_update(m, BOT) is None


def test_safe_anon_update():
    fig4, _ = load_figure("fig4")
    u = safe_anon_update(fig4, p)
    assert set(u.states) == {"(v,a)", "(v,b)", "(v,c)", "(w,a)", "(w,b)", "(w,d)"}
    for fig in ("fig2", "fig3"):
        m, _ = load_figure(fig)
        assert safe_anon_update(m, p) is None


def test_safe_update_points_match_submodel():
    m, _ = load_figure("fig4")
    u = safe_anon_update(m, p)
    sub = restrict(m, m.state_set(["v", "w"]))
    for i, tag in enumerate(u.origin):
        assert are_bisimilar(PointedModel(u, i), sub.pointed(m.states[tag.state]))


def test_product_with_anon_action_model():
    m, point = load_figure("fig1")
    action = anon_action_model(m.agents, p)
    results = product_update(PointedModel(m, point), action.program())
    assert [r.name for r in results] == ["(s,a)", "(s,c)"]
    direct = anon_update(m, p)
    for r in results:
        assert are_bisimilar(r, direct.pointed(r.name))


def test_trivial_action_models():
    m, point = load_figure("fig1")
    trivial = ActionModel(m.agents, ("e",), ((0,),) * 3, (TOP,))
    (out,) = product_update(PointedModel(m, point), trivial.program())
    assert are_bisimilar(out, PointedModel(m, point))
    impossible = ActionModel(m.agents, ("e",), ((0,),) * 3, (BOT,))
    assert product_update(PointedModel(m, point), impossible.program()) == []
    assert product(m, impossible) is None


def test_anon_action_model_shapes():
    three = anon_action_model("abc", p)
    assert three.related("b", 0, 2) and not three.related("b", 0, 1)
    one = anon_action_model("a", p)
    assert one.points == ("a",) and one.pre == (parse_formula("K{a} p"),)
    four = anon_action_model("abcd", p)
    for i, agent in enumerate("abcd"):
        sizes = sorted(sum(1 for y in four.partitions[i] if y == b) for b in set(four.partitions[i]))
        assert sizes == [1, 3], agent


def test_audit_detects_broken_anonymity():
    m, _ = load_figure("fig1")
    # plain anonymous announcements need not be safe: in fig1 some agent can
    # tell who spoke
    assert audit_anonymity(anon_update(m, p))
    fig4, _ = load_figure("fig4")
    assert audit_anonymity(safe_anon_update(fig4, p)) == []


def test_action_model_file(tmp_path):
    spec = {
        "agents": ["a", "b"],
        "points": ["x", "y"],
        "pre": {"x": "p", "y": "~p"},
        "edges": {"b": [["x", "y"]]},
    }
    path = tmp_path / "act.json"
    path.write_text(json.dumps(spec))
    action = load_action_model(path)
    assert action.name == "act"
    assert action.related("b", 0, 1) and not action.related("a", 0, 1)
    again = build_action_model(action_model_to_spec(action))
    assert again == action


def test_action_model_errors():
    with pytest.raises(ModelError):
        build_action_model({"agents": ["a"], "points": []})
    with pytest.raises(ModelError):
        build_action_model({"agents": ["a"], "points": ["x"], "pre": {"z": "p"}})
    m, _ = load_figure("fig1")
    with pytest.raises(ModelError):
        product(m, anon_action_model("ab", p))


def test_safe_update_is_public_update_of_safety():
    from anonpal.generators import random_formula
    from anonpal.syntax import Safe
    checked = 0
    for seed in range(120):
        m = random_model(seed, 1 + seed % 5, 3 + seed % 2, 2)
        phi = random_formula(seed, 2, "epistemic", m.agents)
        upd = safe_anon_update(m, phi)
        if upd is None:
            continue
        sub = public_update(m, Safe(phi))
        names = list(sub.states)
        for u, tag in enumerate(upd.origin):
            checked += 1
            assert are_bisimilar(PointedModel(upd, u), sub.pointed(names.index(m.states[tag.state])))
    assert checked > 0


def test_iterated_names_nest():
    m, _ = load_figure("fig1")
    once = anon_update(m, p)
    twice = anon_update(once, p)
    assert "((s,a),a)" in twice.states or "((s,a),b)" in twice.states
    assert all(name.startswith("((") for name in twice.states)
