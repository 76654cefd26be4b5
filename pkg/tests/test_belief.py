import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtures import fire_site
from sabpi.belief import (
    HybridBelief,
    ObservationContractError,
    acc_mass,
    initial_belief,
    observation_outcomes,
    region_jump,
    trap_mass,
)
from sabpi.model.scenario import scenario_from_json

SITE = (2.2, 0.0)
SENSOR = (1.2, 0.0)


def _posterior_fire(b: HybridBelief) -> float:
    return b.e_marginal().get(1, 0.0)


def test_region_jump_moves_only_the_burning_hypothesis():
    scn = fire_site(formula="F(fire)")
    dfa = scn.dfa
    b = HybridBelief(SITE, 0, {(dfa.initial, 1): 0.5, (dfa.initial, 0): 0.5})
    (acc,) = dfa.accepting
    assert region_jump(scn, b).dist == {(acc, 1): 0.5, (dfa.initial, 0): 0.5}


def test_region_jump_keeps_accepted_mass():
    scn = fire_site(formula="F(fire)")
    (acc,) = scn.dfa.accepting
    b = HybridBelief(SITE, 0, {(acc, 0): 0.25, (acc, 1): 0.75})
    assert region_jump(scn, b).dist == b.dist


def test_region_jump_with_a_single_hypothesis_is_a_dfa_step():
    scn = fire_site(prior_fire=1.0, formula="F(site) & G(!fire)")
    dfa = scn.dfa
    b = initial_belief(scn)
    assert list(b.dist) == [(dfa.initial, 1)]
    jumped = region_jump(scn, b, SITE)
    assert list(jumped.dist) == [(dfa.step(dfa.initial, scn.label_bits(SITE, 1)), 1)]
    assert trap_mass(scn, jumped) == 1.0


def test_observation_with_even_prior():
    scn = fire_site(prior_fire=0.5, accuracy=0.8)
    b = HybridBelief(SENSOR, 0, initial_belief(scn).dist)
    outs = {scn.observation_regions[0].symbol_name(o): (p, post) for o, p, post in observation_outcomes(scn, b, 0)}
    assert outs["fire"][0] == pytest.approx(0.5)
    assert _posterior_fire(outs["fire"][1]) == pytest.approx(0.8)
    assert outs["!fire"][0] == pytest.approx(0.5)
    assert _posterior_fire(outs["!fire"][1]) == pytest.approx(0.2)
    assert all(post.m == 0b1 for _, post in outs.values())


def test_observation_with_prior_035():
    scn = fire_site(prior_fire=0.35, accuracy=0.8)
    b = HybridBelief(SENSOR, 0, initial_belief(scn).dist)
    outs = {o: (p, post) for o, p, post in observation_outcomes(scn, b, 0)}
    p_fire, post = outs[1]
    assert p_fire == pytest.approx(0.41)
    assert round(_posterior_fire(post), 4) == 0.6829


def test_perfect_observation_collapses():
    scn = fire_site(prior_fire=0.3, accuracy=1.0)
    b = HybridBelief(SENSOR, 0, initial_belief(scn).dist)
    outs = {o: (p, post) for o, p, post in observation_outcomes(scn, b, 0)}
    assert outs[1][0] == pytest.approx(0.3) and outs[0][0] == pytest.approx(0.7)
    assert outs[1][1].e_marginal() == {1: 1.0}
    assert outs[0][1].e_marginal() == {0: 1.0}


def test_revisiting_a_sensor_is_a_contract_violation():
    scn = fire_site()
    b = HybridBelief(SENSOR, 0b1, initial_belief(scn).dist)
    with pytest.raises(ObservationContractError):
        observation_outcomes(scn, b, 0)


def test_revisit_leaves_hypotheses_alone():
    scn = fire_site(formula="F(site)")
    b = HybridBelief(SITE, 0b1, {(0, 0): 0.4, (0, 1): 0.6})
    assert region_jump(scn, b).e_marginal() == b.e_marginal()


def test_masses():
    scn = fire_site(formula="F(site) & G(!fire)")
    dfa = scn.dfa
    (acc,) = dfa.accepting
    (trap,) = dfa.trap
    assert acc_mass(scn, HybridBelief(SITE, 0, {(acc, 0): 1.0})) == 1.0
    b = HybridBelief(SITE, 0, {(acc, 0): 0.7, (trap, 1): 0.3})
    assert acc_mass(scn, b) == 0.7 and trap_mass(scn, b) == 0.3
    assert acc_mass(scn, initial_belief(scn)) == 0.0
    assert trap_mass(scn, initial_belief(scn)) == 0.0


def test_initial_belief_jumps_when_starting_inside_a_region():
    scn = fire_site(prior_fire=0.25, formula="F(fire)")
    data = dict(scn.source, initial={"x": list(SITE)})
    scn = scenario_from_json(data)
    assert acc_mass(scn, initial_belief(scn)) == pytest.approx(0.25)


def test_json_round_trip():
    b = HybridBelief((1.0, 2.0), 0b101, {(0, 3): 0.25, (2, 1): 0.75})
    again = HybridBelief.from_json(b.to_json(3))
    assert again.x == b.x and again.m == b.m and again.dist == b.dist
    assert b.to_json(3)["m"] == "101"


# ------------------------------------------------------------- properties
_weights = st.lists(st.floats(0.01, 1.0), min_size=2, max_size=2)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.0, 1.0), st.booleans())
def test_conservation_and_total_probability(prior, accuracy, with_jump):
    scn = fire_site(prior_fire=prior, accuracy=accuracy, formula="F(site & fire)")
    # sensing and labeled region at the same point exercises the composed jump
    b = HybridBelief(SITE if with_jump else SENSOR, 0, initial_belief(scn).dist)
    outs = observation_outcomes(scn, b, 0, dfa_jump=with_jump)
    assert abs(sum(p for _, p, _ in outs) - 1.0) <= 1e-9
    expected = region_jump(scn, b).dist if with_jump else b.dist
    mixed = {}
    for _, p, post in outs:
        assert abs(post.total() - 1.0) <= 1e-9
        assert all(w > 0 for w in post.dist.values())
        for key, w in post.dist.items():
            mixed[key] = mixed.get(key, 0.0) + p * w
    assert mixed.keys() <= expected.keys()
    for key, w in expected.items():
        assert abs(mixed.get(key, 0.0) - w) <= 1e-9


@settings(max_examples=100)
@given(st.sampled_from([SITE, SENSOR, (0.5, 0.0), (0.2, 0.8)]), st.floats(0.0, 1.0))
def test_doom_is_permanent(x, prior):
    scn = fire_site(prior_fire=prior, formula="G(!fire) & F(site)")
    (trap,) = scn.dfa.trap
    b = HybridBelief(x, 0, {(trap, 0): 0.5, (trap, 1): 0.5})
    assert trap_mass(scn, region_jump(scn, b)) == 1.0
