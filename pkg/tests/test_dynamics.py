from __future__ import annotations

import numpy as np
import pytest
from scipy.linalg import expm

from signednet.compensation import Regime, classify, cluster_compensation, delta, predict_steady_state
from signednet.dynamics import (
    SimulationConfig,
    gauge_of,
    integrate,
    reconcile,
    simulated_outcome,
    step_local,
)
from signednet.errors import LengthMismatch, RegimeMismatch
from signednet.generators import random_balanced, random_connected, random_strong_digraph
from signednet.graph import FIXTURES, SignedGraph, load_fixture
from signednet.spectral import laplacian_matrix

G2_X0 = [-0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3]
NEG_PAIR = SignedGraph(2, [(0, 1, -1.0)])
# 2x2 reference system for the order check: one positive edge, k = [0.5, 1]
ORDER_GRAPH = SignedGraph(2, [(0, 1, 1.0)])
ORDER_K = [0.5, 1.0]
ORDER_X0 = [1.0, -0.5]


def _endpoint_error(dt, t_end=2.0):
    cfg = SimulationConfig(dt=dt, t_max=t_end, converge_tol=1e-300, sample_stride=1)
    traj = integrate(ORDER_GRAPH, ORDER_K, ORDER_X0, cfg)
    ref = expm(-t_end * laplacian_matrix(ORDER_GRAPH, ORDER_K)) @ ORDER_X0
    return float(np.max(np.abs(traj.final_state - ref)))


def rk4_order_ratio() -> float:
    """Endpoint error at ``dt`` over the error at ``dt / 2``."""
    return _endpoint_error(0.1) / _endpoint_error(0.05)


# -- local rule ---------------------------------------------------------------------


def test_step_local_examples():
    assert np.array_equal(step_local(SignedGraph(2, [(0, 1, 1.0)]), [0, 0], [1, 0]), [-1, 1])
    assert np.array_equal(step_local(NEG_PAIR, [0, 0], [1, 0]), [1, -1])
    with pytest.raises(LengthMismatch):
        step_local(NEG_PAIR, [0, 0], [1, 0, 0])
    with pytest.raises(LengthMismatch):
        step_local(NEG_PAIR, [0], [1, 0])


def test_step_local_matches_matrix_on_fixtures(rng):
    for name in FIXTURES:
        g = load_fixture(name)
        for k in (np.zeros(g.n), delta(g).k, rng.uniform(-1, 3, g.n)):
            for _ in range(10):
                x = rng.standard_normal(g.n)
                ref = -laplacian_matrix(g, k) @ x
                assert np.abs(step_local(g, k, x) - ref).max() <= 1e-12


def test_step_local_matches_matrix_random(rng):
    for _ in range(100):
        n = int(rng.integers(2, 12))
        g = random_strong_digraph(rng, n) if rng.random() < 0.5 else random_connected(rng, n)
        k = rng.uniform(-1, 3, n)
        x = rng.standard_normal(n)
        assert np.abs(step_local(g, k, x) + laplacian_matrix(g, k) @ x).max() <= 1e-12


# -- integrator -------------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        SimulationConfig(dt=0)
    with pytest.raises(ValueError):
        SimulationConfig(sample_stride=0)
    with pytest.raises(ValueError):
        integrate(load_fixture("g1"), np.zeros(8), np.ones(8), SimulationConfig(dt=1.0))


def test_zero_state_is_converged_at_start():
    traj = integrate(load_fixture("g1"), np.zeros(8), np.zeros(8))
    assert traj.converged and not traj.diverged
    assert traj.final_time == 0.0 and len(traj.times) == 1


def test_g1_without_compensation_diverges(rng):
    traj = integrate(load_fixture("g1"), np.zeros(8), rng.uniform(-1, 1, 8))
    assert traj.diverged and not traj.converged
    assert np.abs(traj.final_state).max() >= 1e6
    assert simulated_outcome(traj) == "Divergent"


def test_g1_delta_converges_to_prediction(rng):
    g = load_fixture("g1")
    d = delta(g).k
    x0 = rng.uniform(-1, 1, 8)
    traj = integrate(g, d, x0, SimulationConfig(t_max=200))
    assert traj.converged
    assert np.abs(traj.final_state - predict_steady_state(g, d, x0)).max() <= 1e-6


def test_trajectory_sampling_layout():
    cfg = SimulationConfig(dt=0.01, t_max=0.255, converge_tol=1e-300, sample_stride=5)
    traj = integrate(ORDER_GRAPH, ORDER_K, ORDER_X0, cfg)
    assert traj.states.shape == (len(traj.times), 2)
    assert traj.final_time == pytest.approx(0.255)
    steps = np.diff(traj.times[:-1])
    assert np.allclose(steps, 0.05)
    assert np.all(np.diff(traj.times) > 0)


def test_trajectory_csv():
    cfg = SimulationConfig(dt=0.01, t_max=0.02, converge_tol=1e-300, sample_stride=1)
    text = integrate(NEG_PAIR, [2, 2], [1, 0], cfg).to_csv()
    lines = text.splitlines()
    assert lines[0] == "t,x0,x1"
    assert lines[1] == "0.000000e+00,1.000000e+00,0.000000e+00"
    assert len(lines) == 4 and lines[-1].startswith("2.000000e-02,")


def test_rk4_order():
    ratio = rk4_order_ratio()
    assert 12 <= ratio <= 20
    assert _endpoint_error(0.01) < 1e-9


def test_unsigned_sum_conserved(rng):
    for _ in range(10):
        g = random_connected(rng, int(rng.integers(2, 10)), p_negative=0.0)
        x0 = rng.uniform(-1, 1, g.n)
        traj = integrate(g, np.zeros(g.n), x0, SimulationConfig(t_max=50, converge_tol=1e-300))
        assert np.abs(traj.states.sum(axis=1) - x0.sum()).max() <= 1e-9


def test_gauge_equivariance(rng):
    cfg = SimulationConfig(t_max=5, converge_tol=1e-300, sample_stride=7)
    for _ in range(10):
        g = random_balanced(rng, int(rng.integers(2, 9)))
        s = gauge_of(g)
        x0 = rng.uniform(-1, 1, g.n)
        a = integrate(g, delta(g).k, x0, cfg)
        flipped = SignedGraph(g.n, [(i, j, w * s[i] * s[j]) for i, j, w in g.edges])
        b = integrate(flipped, np.zeros(g.n), s * x0, cfg)
        assert np.array_equal(a.times, b.times)
        assert np.abs(a.states * s - b.states).max() <= 1e-9


def test_gauge_of_imbalanced_is_none():
    assert gauge_of(load_fixture("g2")) is None
    assert np.array_equal(np.abs(gauge_of(load_fixture("g1"))), np.ones(8))


# -- reconciliation ---------------------------------------------------------------------


def test_reconcile_g2_cluster():
    g = load_fixture("g2")
    c = cluster_compensation(g)
    pred = classify(g, c)
    traj = integrate(g, c, G2_X0, SimulationConfig(t_max=200))
    rep = reconcile(traj, pred)
    assert rep.agree and rep.max_deviation <= 1e-4
    assert rep.predicted == "ClusterConsensus" and rep.simulated == "Converged"


def test_reconcile_bipartite_pattern(rng):
    g = load_fixture("g1")
    d = delta(g).k
    traj = integrate(g, d, rng.uniform(0, 1, 8), SimulationConfig(t_max=200))
    rep = reconcile(traj, classify(g, d))
    assert rep.agree and "signs follow the gauge" in rep.detail
    x = traj.final_state
    assert np.ptp(np.abs(x)) <= 1e-6
    assert np.array_equal(np.sign(x), np.sign(gauge_of(g) * np.sign(x[0]) * gauge_of(g)[0]))


def test_reconcile_neg_pair():
    traj = integrate(NEG_PAIR, [2, 2], [1, 0])
    rep = reconcile(traj, classify(NEG_PAIR, [2, 2]))
    assert rep.agree
    assert np.allclose(traj.final_state, [0.5, -0.5], atol=1e-8)


def test_reconcile_trivial_and_unstable(rng):
    g = load_fixture("g1")
    d = delta(g).k
    traj = integrate(g, d + 1, rng.uniform(-1, 1, 8))
    assert reconcile(traj, classify(g, d + 1)).agree
    assert np.abs(traj.final_state).max() <= 1e-6
    div = integrate(g, np.zeros(8), rng.uniform(-1, 1, 8))
    rep = reconcile(div, classify(g, np.zeros(8)))
    assert rep.agree and rep.simulated == "Divergent" and rep.predicted == "Unstable"


def test_reconcile_mismatch_raises(rng):
    g = load_fixture("g1")
    d = delta(g).k
    traj = integrate(g, d + 1, rng.uniform(-1, 1, 8))
    wrong = classify(g, np.zeros(8))
    with pytest.raises(RegimeMismatch) as info:
        reconcile(traj, wrong)
    assert info.value.report.predicted == "Unstable"
    assert info.value.report.simulated == "Converged"
    assert not reconcile(traj, wrong, strict=False).agree


def test_reconcile_indeterminate_uses_spectral_verdict():
    g = load_fixture("g2")
    k = cluster_compensation(g).k - 0.1
    pred = classify(g, k)
    assert pred.regime is Regime.INDETERMINATE
    # growth rate 0.1, so the run needs a long horizon to cross the threshold
    rep = reconcile(integrate(g, k, G2_X0, SimulationConfig(t_max=400)), pred)
    assert rep.agree and rep.simulated == "Divergent"
