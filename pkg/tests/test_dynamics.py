import numpy as np
import pytest
from hypothesis import given, strategies as st

from loggas import dynamics as D
from loggas.errors import CollisionDetected, SubstepCapExceeded
from loggas.samplers import replica_rng, sample_circular_beta2, sample_poisson_window


def test_cutoff_drift_examples():
    assert D.drift_dyson_cutoff(np.array([-1.5, 0.0, 1.5]), 1, 10, 2) == 0
    assert D.drift_dyson_cutoff(np.array([0.0, 1.0]), 0, 1.0, 2) == -1
    # |x_j| = R is inside the cutoff, R slightly smaller excludes it
    assert D.drift_dyson_cutoff(np.array([0.0, 1.0]), 0, 1.0 - 1e-12, 2) == 0


def test_periodic_drift_examples():
    n = 16
    x = -n / 2 + np.arange(n) + 0.5
    assert np.allclose([D.drift_dyson_periodic(x, i, 2, n) for i in range(n)], 0, atol=1e-12)
    g, beta = 0.7, 2.0
    expected = beta * np.pi / (2 * n) / np.tan(np.pi * g / n)
    assert D.drift_dyson_periodic(np.array([0.0, g]), 1, beta, n) == pytest.approx(expected)
    assert D.drift_dyson_periodic(np.array([0.0, g]), 0, beta, n) == pytest.approx(-expected)


def test_collision_detected():
    with pytest.raises(CollisionDetected):
        D.drift_dyson_periodic(np.array([1.0, 1.0]), 0, 2, 8)


def test_ginibre_drift_examples():
    assert D.drift_ginibre_A(np.array([1 + 2j]), 0, 5.0) == -(1 + 2j)
    z = 0.6 - 0.3j
    assert D.drift_ginibre_A(np.array([z, -z]), 0, 5.0) == pytest.approx(-z + z / (2 * abs(z) ** 2))
    assert D.drift_ginibre_B(np.array([z]), 0, 1.0) == 0
    pair = np.array([0.1j, 0.5])
    assert D.drift_ginibre_B(pair, 0, 1.0) == pytest.approx(-D.drift_ginibre_B(pair, 1, 1.0))
    assert D.drift_ginibre_B(np.array([0, 3.0]), 0, 1.0) == 0
    assert D.drift_ginibre_B(np.array([0, 3.0]), 1, 1.0) == 0


def _cfg(model, **kw):
    base = dict(R=3.0 if model in ("dyson-cutoff", "ginibre-a", "ginibre-b") else None,
                n=16 if model == "dyson-periodic" else None)
    base.update(kw)
    return D.SdeConfig(model, **base)


points_1d = st.lists(st.floats(-7.5, 7.5), min_size=2, max_size=10, unique=True).filter(
    lambda v: np.min(np.diff(np.sort(v))) > 1e-3)
points_2d = st.lists(st.tuples(st.floats(-4, 4), st.floats(-4, 4)), min_size=1, max_size=10, unique=True).map(
    lambda v: np.array([a + 1j * b for a, b in v])).filter(
    lambda z: z.size < 2 or np.min(np.abs(np.subtract.outer(z, z))[~np.eye(z.size, dtype=bool)]) > 1e-3)


@given(points_1d)
def test_vectorised_matches_scalar_1d(v):
    x = np.sort(np.array(v))
    for model in ("dyson-cutoff", "dyson-periodic"):
        cfg = _cfg(model)
        vec = D.drift_all(x[None, :], cfg)[0]
        if model == "dyson-cutoff":
            ref = [D.drift_dyson_cutoff(x, i, cfg.R, cfg.beta) for i in range(x.size)]
        else:
            ref = [D.drift_dyson_periodic(x, i, cfg.beta, cfg.n) for i in range(x.size)]
        assert np.allclose(vec, ref, rtol=1e-9, atol=1e-9)


@given(points_2d)
def test_vectorised_matches_scalar_2d(z):
    for model, fn in (("ginibre-a", lambda i, c: D.drift_ginibre_A(z, i, c.R)),
                      ("ginibre-finite", lambda i, c: D.drift_ginibre_A(z, i, None)),
                      ("ginibre-b", lambda i, c: D.drift_ginibre_B(z, i, c.R))):
        cfg = _cfg(model)
        assert np.allclose(D.drift_all(z[None, :], cfg)[0], [fn(i, cfg) for i in range(z.size)], atol=1e-9)


@given(points_1d)
def test_periodic_interaction_sums_to_zero(v):
    x = np.array(v)
    assert abs(D.drift_all(x[None, :], _cfg("dyson-periodic"))[0].sum()) <= 1e-10 * (1 + np.abs(
        D.drift_all(x[None, :], _cfg("dyson-periodic"))).sum())


@given(points_2d)
def test_planar_interaction_sums_to_zero(z):
    for model, shift in (("ginibre-b", 0), ("ginibre-finite", 1)):
        d = D.drift_all(z[None, :], _cfg(model))[0] + shift * z
        assert abs(d.sum()) <= 1e-10 * (1 + np.abs(d).sum())


def test_zero_noise_symmetry_preserved():
    cfg = D.SdeConfig("dyson-cutoff", R=10.0, dt=1e-3, T=0.5, noise=False)
    x0 = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    traj = D.simulate(cfg, x0)
    assert np.allclose(traj.states, -traj.states[:, ::-1], atol=1e-12)


def test_seed_determinism():
    cfg = D.SdeConfig("dyson-periodic", n=8, dt=1e-3, T=0.05, seed=9)
    x0 = sample_circular_beta2(8, 1).points
    a, b = D.simulate(cfg, x0), D.simulate(cfg, x0)
    assert np.array_equal(a.states, b.states)
    c = D.simulate(D.SdeConfig(**{**cfg.to_dict(), "seed": 10}), x0)
    assert not np.array_equal(a.states, c.states)


def test_batching_does_not_change_replicas():
    cfg = D.SdeConfig("dyson-periodic", n=8, dt=1e-3, T=0.3, seed=2)
    X0 = np.stack([sample_circular_beta2(8, replica_rng(0, r)).points for r in range(4)])
    together = D.simulate_ensemble(cfg, X0)
    alone = D.simulate_ensemble(cfg, X0[2:3], replicas=[2])
    assert np.array_equal(together[2].states, alone[0].states)


def test_step_matches_em_when_far_apart():
    cfg = D.SdeConfig("dyson-periodic", n=8, dt=1e-4, seed=0)
    x = -4 + np.arange(8) + 0.5
    y = D.step(x, cfg, np.random.default_rng(1))
    dW = np.sqrt(cfg.dt) * np.random.default_rng(1).standard_normal(8)
    assert np.allclose(y, x + dW, atol=1e-12)


def test_ou_weak_order():
    T, z0 = 1.0, 2.0
    cfg = D.SdeConfig("ginibre-a", R=1.0, dt=1e-3, T=T, seed=4)
    trajs = D.simulate_ensemble(cfg, np.full((2000, 1), z0, complex), keep_frames=False)
    m2 = np.array([abs(t.states[-1, 0]) ** 2 for t in trajs])
    exact = 1 + (z0**2 - 1) * np.exp(-2 * T)
    assert abs(m2.mean() - exact) <= 3 * m2.std(ddof=1) / np.sqrt(m2.size)


def test_T_zero_single_frame():
    traj = D.simulate(D.SdeConfig("dyson-periodic", n=4, T=0.0), [-1.5, -0.5, 0.5, 1.5])
    assert traj.times.size == 1 and traj.states.shape == (1, 4)


def test_record_every_frame_count():
    cfg = D.SdeConfig("dyson-periodic", n=4, dt=1e-3, T=0.1, record_every=10)
    assert D.simulate(cfg, [-1.5, -0.5, 0.5, 1.5]).times.size == 11


def test_periodic_no_crossings_short_run():
    n = 16
    cfg = D.SdeConfig("dyson-periodic", n=n, dt=1e-4, T=0.05, seed=3, stationary_start=True)
    X0 = np.stack([sample_circular_beta2(n, replica_rng(1, r)).points for r in range(50)])
    for t in D.simulate_ensemble(cfg, X0):
        assert t.min_gaps.min() > 0 and not t.aborted


def test_substeps_rescue_coarse_steps():
    # at dt = 1e-3 plain Euler steps occasionally cross; the bridge substeps must repair them
    cfg = D.SdeConfig("dyson-periodic", n=16, dt=1e-3, T=0.1, seed=0)
    X0 = np.stack([sample_circular_beta2(16, replica_rng(1, r)).points for r in range(100)])
    trajs = D.simulate_ensemble(cfg, X0)
    assert max(t.substeps.max() for t in trajs) > 1
    assert all(t.min_gaps.min() >= cfg.eps and not t.aborted for t in trajs)


def test_substep_cap_aborts_with_partial_state():
    # a bridge fixes the endpoint increment, so an eps above the reachable gap cannot be met
    x0 = np.array([0.0, 0.012, 2.0])
    cfg = D.SdeConfig("dyson-cutoff", R=5.0, dt=1e-4, T=0.005, eps=5.0, max_substeps=4, seed=0)
    with pytest.raises(SubstepCapExceeded) as info:
        D.simulate(cfg, x0)
    assert info.value.state is not None
    partial = D.simulate_ensemble(cfg, x0[None, :])[0]
    assert partial.aborted and np.array_equal(partial.states[-1], x0)


def test_sde_config_validation():
    with pytest.raises(ValueError):
        D.SdeConfig("dyson-cutoff")
    with pytest.raises(ValueError):
        D.SdeConfig("dyson-periodic")
    with pytest.raises(ValueError):
        D.SdeConfig("langevin")


def test_unlabelled_projection():
    cfg = D.SdeConfig("ginibre-finite", dt=1e-3, T=0.01)
    traj = D.simulate(cfg, np.array([1 + 1j, -1 - 1j, 0.5j]))
    u = traj.unlabelled()
    assert np.array_equal(u[0], np.sort_complex(traj.states[0]))


def test_nearest_gap_near_origin():
    x = np.array([[-3.0, 0.2, 1.0, 5.0]])
    assert D.nearest_gap_near_origin(x)[0] == pytest.approx(0.8)
    # periodic wrap: 7.9 and -7.9 are 0.2 apart on a torus of size 16
    assert D.nearest_gap_near_origin(np.array([[-7.9, 7.9, 0.0, 3.0]]), 16)[0] == pytest.approx(3.0)


def test_partial_sums_symmetric_vanish():
    x = np.array([-5.0, -2.0, -1.0, 0.0, 1.0, 2.0, 5.0])
    radii, vals = D.cutoff_partial_sums(x, 3)
    assert np.allclose(vals, 0)
    rep = D.drift_convergence_study([x], (1, 2), 10)
    assert np.all(rep["per_sample"] == 0)


def test_partial_sums_match_drift():
    x = np.sort(np.random.default_rng(0).uniform(-50, 50, 80))
    radii, vals = D.cutoff_partial_sums(x, 40)
    for R in (3.0, 10.0, 49.0):
        k = np.searchsorted(radii, R, side="right") - 1
        assert vals[k] == pytest.approx(D.drift_dyson_cutoff(x, 40, R, 2.0))


def test_drift_study_poisson_control_reported():
    samples = [sample_poisson_window(200, 1.0, replica_rng(0, r)).points for r in range(20)]
    rep = D.drift_convergence_study(samples, (10, 20, 40), 100)
    assert rep["per_sample"].shape == (20, 3) and np.all(np.isfinite(rep["median"]))
