import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import two_cluster_scenario
from risconn.assignment import Assignment
from risconn.ga import GaConfig
from risconn.graph import RIS, Edge, fiedler, lambda2
from risconn.placement import (AdamConfig, AdamState, PlacementProblem, adam_step, grad_lambda2, objective,
                               optimize_positions, trajectory_to_csv)
from risconn.radio import RadioConstants, aligned_profile, cascade_coefficient, link_sinrs, ris_angle
from risconn.scenario import build_d2d_graph
from risconn.selection import perturbation_select


def scalar_adam(grads, nu=0.001, b1=0.9, b2=0.999, eps=1e-8, x0=0.0):
    """Textbook descent-form Adam on a scalar, fed the negated (ascent) gradient."""
    x, m, v = x0, 0.0, 0.0
    xs = []
    for i, g in enumerate(grads, start=1):
        g = -g
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        mh = m / (1 - b1**i)
        vh = v / (1 - b2**i)
        x = x - nu * mh / (math.sqrt(vh) + eps)
        xs.append((x, m, v))
    return xs


def test_config_validation():
    for bad in (dict(step=0), dict(beta1=1.0), dict(beta2=-0.1), dict(epsilon=0), dict(iterations=0)):
        with pytest.raises(ValueError):
            AdamConfig(**bad)


def test_first_step_moves_by_step_size():
    s = adam_step(AdamState.start([0.0]), [3.0], AdamConfig())
    assert s.positions[0] == pytest.approx(0.001, rel=1e-6)
    assert s.i == 1


def test_zero_gradient_never_moves():
    s = AdamState.start([1.0, 2.0])
    for _ in range(5):
        s = adam_step(s, [0.0, 0.0], AdamConfig())
    np.testing.assert_array_equal(s.positions, [1.0, 2.0])


def test_two_steps_hand_values():
    cfg = AdamConfig()
    s = adam_step(adam_step(AdamState.start([0.0]), [2.0], cfg), [2.0], cfg)
    # m1 = -0.2, m2 = -0.38; v1 = 0.004, v2 = 0.007996
    assert s.m[0] == pytest.approx(-0.38)
    assert s.v[0] == pytest.approx(0.007996)
    assert s.positions[0] == pytest.approx(0.002, rel=1e-6)


@given(st.lists(st.floats(-100, 100), min_size=1, max_size=30))
def test_adam_matches_scalar_recursion(grads):
    cfg = AdamConfig()
    s = AdamState.start([0.0])
    for g, (x, m, v) in zip(grads, scalar_adam(grads)):
        s = adam_step(s, [g], cfg)
        assert abs(s.positions[0] - x) <= 1e-12
        assert abs(s.m[0] - m) <= 1e-12 and abs(s.v[0] - v) <= 1e-12


# ------------------------------------------------------------------ objective


@pytest.fixture(scope="module")
def bridged():
    scn = two_cluster_scenario()
    g = build_d2d_graph(scn)
    sel = perturbation_select(scn, g, 1, GaConfig(generations=30))
    return scn, g, sel


def test_objective_matches_selection(bridged):
    scn, g, sel = bridged
    val = objective(scn, sel.assignment, sel.profiles, scn.ris_positions, base=g)
    assert val == pytest.approx(sel.lambda2, rel=1e-12)
    prob = PlacementProblem(scn, sel.assignment, sel.profiles, base=g)
    assert lambda2(prob.graph(scn.ris_positions)) == pytest.approx(val, rel=1e-12)


def test_objective_without_ris_is_constant():
    scn = two_cluster_scenario(n_ris=0, gap=4.0)
    g = build_d2d_graph(scn)
    a = Assignment.empty(0, 6)
    assert objective(scn, a, [], np.zeros((0, 2))) == pytest.approx(lambda2(g))
    assert grad_lambda2(scn, a, [], np.zeros(0)).shape == (0,)


def test_ten_times_farther_costs_forty_db(bridged):
    scn, g, sel = bridged
    [(u, m, r)] = sel.assignment.triples()
    p = scn.ris_positions[m]
    far = replace(scn, ue_positions=p + 10 * (scn.ue_positions - p))
    near_c = cascade_coefficient(scn, m, u, r) ** 2
    far_c = cascade_coefficient(far, m, u, r) ** 2
    assert ris_angle(far, m, u) == pytest.approx(ris_angle(scn, m, u))
    assert 10 * math.log10(near_c / far_c) == pytest.approx(40.0, abs=1e-9)
    w = link_sinrs(scn, sel.assignment, sel.profiles)[0]
    weaker = g.with_edges([Edge(u, r, w * far_c / near_c, RIS)])
    assert lambda2(weaker) <= sel.lambda2 + 1e-12


def test_coincident_ris_rejected(bridged):
    scn, g, sel = bridged
    [(u, m, r)] = sel.assignment.triples()
    with pytest.raises(ValueError):
        objective(scn, sel.assignment, sel.profiles, scn.ue_positions[[u]], base=g)


# ------------------------------------------------------------------ gradient


def symmetric_fixture():
    """UE pair mirrored about x = 0 with the RIS on the bisector."""
    scn = two_cluster_scenario(gap=16.0)
    a = Assignment.empty(1, 6)
    a.assign(0, 1, [3])  # (2, 0) and (16, 0): bisector x = 9
    scn = scn.with_ris_positions([[9.0, -6.0]])
    th_u, th_r = ris_angle(scn, 0, 1), ris_angle(scn, 0, 3)
    assert th_u == pytest.approx(-th_r)
    return scn, a, [aligned_profile(scn.geometry, th_u, th_r)]


def test_symmetric_gradient_along_normal_vanishes():
    scn, a, prof = symmetric_fixture()
    # graph of the pair alone: only the RIS link, so lambda2 tracks its weight
    prob = PlacementProblem(scn, a, prof, base=build_d2d_graph(scn))
    g = prob.gradient(scn.ris_positions, 0.01)
    assert abs(g[0]) <= 1e-6 * max(1.0, abs(g[1]))


def test_fd_gradient_one_sided_consistency(bridged):
    scn, g, sel = bridged
    prob = PlacementProblem(scn, sel.assignment, sel.profiles, base=g)
    x = scn.ris_positions.ravel() + [1.3, 0.4]  # off the symmetry axis
    central = prob.gradient(x, 0.01)
    h = 0.001
    f0 = prob.objective(x)
    one_sided = np.array([(prob.objective(x + h * e) - f0) / h for e in np.eye(2)])
    np.testing.assert_allclose(one_sided, central, rtol=1e-2)


def test_fd_gradient_matches_chain_rule(bridged):
    scn, g, sel = bridged
    prob = PlacementProblem(scn, sel.assignment, sel.profiles, base=g)
    [(u, m, r)] = sel.assignment.triples()
    x = scn.ris_positions.ravel() + [1.3, 0.4]
    res = fiedler(prob.graph(x))
    assert res.simple
    dl_dw = (res.vector[u] - res.vector[r]) ** 2
    h = 0.01
    dw = np.array([(prob.weights(x + h * e)[0] - prob.weights(x - h * e)[0]) / (2 * h) for e in np.eye(2)])
    np.testing.assert_allclose(grad_lambda2(scn, sel.assignment, sel.profiles, x, base=g), dl_dw * dw, rtol=5e-2)


# ------------------------------------------------------------------ ascent


def test_single_iteration_zero_gradient_keeps_start():
    scn, a, prof = symmetric_fixture()
    far = scn.with_ris_positions([[9.0, 500.0]])  # behind the array: element gain is zero
    res = optimize_positions(far, a, prof, AdamConfig(iterations=1), base=build_d2d_graph(far))
    np.testing.assert_array_equal(res.positions, far.ris_positions)
    assert res.lambda2 == res.initial_lambda2


def test_bridge_placement_never_worse(bridged):
    scn, g, sel = bridged
    res = optimize_positions(scn, sel.assignment, sel.profiles, AdamConfig(iterations=40),
                             reliability=sel.reliability, base=g)
    assert res.lambda2 >= res.initial_lambda2
    assert res.initial_lambda2 == pytest.approx(sel.lambda2)
    assert len(res.trajectory) == 41
    assert res.trajectory[res.best_iteration][1] == res.lambda2


def test_infeasible_everywhere_falls_back():
    scn = two_cluster_scenario(gap=4.0, constants=RadioConstants(ris_sinr_threshold_db=400.0))
    g = build_d2d_graph(scn)
    a = Assignment.empty(1, 6)
    a.assign(0, 0, [4])
    prof = [np.zeros(10)]
    res = optimize_positions(scn, a, prof, AdamConfig(iterations=5), reliability=np.ones(6), base=g)
    assert res.infeasible
    np.testing.assert_array_equal(res.positions, scn.ris_positions)


def test_trajectory_csv():
    text = trajectory_to_csv([(0, 1.5, True, np.array([1.0, 2.0]))], 1)
    assert text == "iter,lambda2,feasible,pos_m0_x,pos_m0_y\n0,1.5,1,1,2\n"
