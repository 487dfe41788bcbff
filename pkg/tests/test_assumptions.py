import numpy as np
import pytest
from hypothesis import given, strategies as st

from loggas import assumptions as A
from loggas.errors import RatioNotLessThanOne, ZeroVector
from loggas.samplers import replica_rng, sample_ginibre, sample_sine_window

# 2 int_1^inf r^{-2} Q(64, r^2) dr, 25-digit quadrature
UBAR3_GINIBRE_64 = 1.748523136772164718020199

PL = A.PlanarEmbedding()
EMB2 = A.EmbeddingVarpi(2)
FIN2 = A.PotentialPair("finite", 2.0, EMB2)


def test_hamiltonian_examples():
    dy = A.PotentialPair("dyson", 2.0)
    assert A.hamiltonian(dy, None, np.array([])) == 0
    assert A.hamiltonian(dy, None, np.array([0.0, 1.0])) == 0
    assert A.hamiltonian(dy, None, np.array([0.5, 0.5])) == np.inf
    gin = A.PotentialPair("ginibre")
    assert A.hamiltonian(gin, lambda z: np.abs(z) <= 1, np.array([0.5, 1j, 5.0])) == pytest.approx(
        0.25 + 1.0 - 2 * np.log(abs(0.5 - 1j)))


def test_varpi_origin_and_identity_region():
    assert np.array_equal(EMB2(0.0), [0.0, 0.0])
    far = np.array([-40.0, -3.0, 3.0, 3.5, 17.25])
    out = EMB2(far)
    assert np.array_equal(out[:, 0], far) and np.array_equal(out[:, 1], np.zeros(5))


@pytest.mark.parametrize("N", range(1, 7))
def test_varpi_edge_deviation(N):
    rep = A.varpi_bounds_report(N)
    assert rep["deviation_at_N"] <= 5 * N**2 * 2.0 ** (-4 * N)
    assert rep["identity_exact"]
    for xb in (float(N), float(N + 1)):
        assert rep["value_jump"][xb] <= 1e-12
        assert rep["derivative_jump"][xb] <= 1e-12
    assert 0.5 <= rep["ratio_inf"] <= rep["ratio_sup"] <= 2


@given(st.floats(-6, 6), st.integers(1, 3))
def test_varpi_derivative_matches_finite_difference(x, N):
    emb = A.EmbeddingVarpi(N)
    h = 1e-6
    if any(abs(abs(x) - b) < 2 * h for b in (N, N + 1)):
        return
    fd = (emb(x + h) - emb(x - h)) / (2 * h)
    assert np.allclose(emb.derivative(x), fd, atol=1e-6)


def test_inverse_radius():
    for rad in (0.3, 1.7, 2.5, 10.0):
        assert float(EMB2.radius(EMB2.inverse_radius(rad))) == pytest.approx(rad, abs=1e-12)


def test_t_il_examples():
    assert A.t_il((1,), 3, np.array([1.0, 0.0])) == pytest.approx(1.0)
    assert A.t_il((-1,), 1, np.array([0.0, 1.0])) == pytest.approx(1.0)
    with pytest.raises(ZeroVector):
        A.angles(np.zeros(2))


def _cos_err(x, y, ell, d):
    ang = np.arccos(np.clip(x @ y / np.linalg.norm(x) / np.linalg.norm(y), -1, 1))
    s = sum(A.t_il(i, ell, x) * A.t_il(i, ell, y) for i in A.sign_vectors(d))
    return abs(np.cos(ell * ang) - s)


def test_cosine_identity_d1():
    rng = np.random.default_rng(0)
    assert max(_cos_err(rng.standard_normal(2), rng.standard_normal(2), int(rng.integers(1, 6)), 1)
               for _ in range(1000)) <= 1e-12


def test_cosine_identity_d2_embedded_plane():
    rng = np.random.default_rng(1)
    errs = []
    for _ in range(1000):
        x, y = rng.standard_normal(4), rng.standard_normal(4)
        x[[1, 3]] = y[[1, 3]] = 0
        errs.append(_cos_err(x, y, int(rng.integers(1, 6)), 2))
    assert max(errs) <= 1e-12


def test_sign_vectors():
    assert A.sign_vectors(1) == [(1,), (-1,)]
    assert len(set(A.sign_vectors(2))) == 4


def test_h_rs_trivia():
    cfg = np.array([-3.3, 2.2, 5.0])
    assert A.h_rs(FIN2, 1, 4, 0.0, cfg) == 0
    assert A.h_rs(FIN2, 10, 20, 0.7, cfg) == 0


def test_h_rs_single_point():
    y, x = 2.5, 0.5
    X, Y = EMB2(x), EMB2(y)
    expected = -2.0 * np.log(np.linalg.norm(X - Y) / np.linalg.norm(Y))
    assert A.h_rs(FIN2, 1, 4, x, np.array([y])) == pytest.approx(expected, rel=1e-13)


@given(st.lists(st.floats(-30, 30), min_size=1, max_size=12), st.floats(-1, 1))
def test_h_rs_relabel_invariant(v, x):
    cfg = np.array(v)
    perm = np.random.default_rng(len(v)).permutation(len(v))
    assert A.h_rs(FIN2, 1, 8, x, cfg[perm]) == pytest.approx(A.h_rs(FIN2, 1, 8, x, cfg), abs=1e-12)


def test_lipschitz_brute_force_and_empty():
    cfg = np.array([-6.0, -2.5, 2.5, 6.0])
    grid = np.linspace(-0.9, 0.9, 21)
    h = np.array([A.h_rs(FIN2, 1, 8, g, cfg) for g in grid])
    brute = max(abs(h[a] - h[b]) / abs(grid[a] - grid[b]) for a in range(21) for b in range(21) if a != b)
    assert A.lipschitz_H(FIN2, 1, 8, cfg, grid=grid) == pytest.approx(brute, rel=1e-10)
    assert A.lipschitz_H(FIN2, 20, 40, cfg) == 0


def test_hamiltonian_difference_bound():
    rng = np.random.default_rng(3)
    cfg = sample_sine_window(2, 5).points
    far = np.concatenate([cfg, rng.uniform(3, 30, 10), -rng.uniform(3, 30, 10)])
    grid = np.linspace(-0.95, 0.95, 41)
    L = A.lipschitz_H(FIN2, 1, 30, far, grid=grid)
    h = np.array([A.h_rs(FIN2, 1, 30, g, far) for g in grid])
    m = 3
    for _ in range(50):
        a, b = rng.integers(0, grid.size, m), rng.integers(0, grid.size, m)
        assert abs(h[a].sum() - h[b].sum()) <= m * L * (grid[-1] - grid[0]) + 1e-12


def test_u_statistics():
    assert A.u_stat(PL, 1, (1,), 1, 4, np.array([]), None) == 0
    assert A.ubar(PL, 3, np.array([]), None) == 0
    assert A.ubar(PL, 3, np.array([2.0])) == pytest.approx(1 / 8)


def test_ubar_ginibre_mean():
    vals = np.array([A.ubar(PL, 3, sample_ginibre(64, replica_rng(8, r)).points) for r in range(400)])
    assert abs(vals.mean() - UBAR3_GINIBRE_64) <= 3 * vals.std(ddof=1) / np.sqrt(vals.size)
    assert UBAR3_GINIBRE_64 <= 2


def test_g_stat_and_recursion():
    assert A.g_stat(PL, 1, (1,), 6, 1, np.array([])) == 0
    assert A.recursion_check(PL, np.array([]), 1, (1,), 6) == 0
    z = np.array([2.5 + 1j])
    g0 = A.g_stat(PL, 2, (-1,), 6, 0, z)
    assert A.g_stat(PL, 2, (-1,), 6, 1, z) == pytest.approx(np.ceil(abs(z[0])) * g0)


@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.sampled_from([(1,), (-1,)]), st.integers(2, 12),
       st.integers(1, 3))
def test_recursion_identity(seed, ell, i, r, j):
    rng = np.random.default_rng(seed)
    z = 4 * (rng.standard_normal(20) + 1j * rng.standard_normal(20))
    assert A.recursion_check(PL, z, ell, i, r, j) <= 1e-12


def test_v_rs_trivia():
    cfg = np.array([3.0, -5.0])
    assert A.v_rs(EMB2, 1, 1, 8, 0.0, cfg) == 0
    assert A.v_rs(EMB2, 1, 20, 30, 0.5, cfg) == 0


@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.floats(-0.9, 0.9))
def test_v_rs_expansion(seed, ell, x):
    cfg = np.random.default_rng(seed).uniform(-40, 40, 25)
    for emb in (EMB2, PL):
        assert abs(A.v_rs(emb, ell, 1, 30, x, cfg) - A.v_rs_from_u(emb, ell, 1, 30, x, cfg)) <= 1e-10


def test_vbar_finite_and_empty():
    cfg = np.array([-9.0, 4.0, 12.0])
    pairs = [(a, b) for a in np.linspace(-0.9, 0.9, 7) for b in np.linspace(-0.9, 0.9, 7)]
    assert np.isfinite(A.vbar(EMB2, 2, 1, cfg, pairs)) and A.vbar(EMB2, 2, 1, cfg, pairs) > 0
    assert A.vbar(EMB2, 2, 50, cfg, pairs) == 0


def test_taylor_bound_grid():
    for r in np.arange(1, 10) / 10:
        for a in (0, np.pi / 4, np.pi / 2, np.pi):
            for l0 in (2, 3):
                y = np.array([np.cos(a), np.sin(a)])
                assert A.taylor_log_bound_check(np.array([r, 0.0]), y, l0) >= -1e-12
                # antipodal direction
                assert A.taylor_log_bound_check(-r * y, y, l0) >= -1e-12
    # both sides vanish; only rounding of the O(1) log terms remains
    assert abs(A.taylor_log_bound_check(np.array([1e-9, 0.0]), np.array([1.0, 0.0]), 2)) <= 1e-15
    with pytest.raises(RatioNotLessThanOne):
        A.taylor_log_bound_check(np.array([2.0, 0.0]), np.array([1.0, 0.0]), 2)


def test_u_integral():
    emb = A.EmbeddingVarpi(2)
    assert A.u_N_r_integral(emb, 8, (1,)) == 0
    assert A.u_N_r_integral(emb, 1, (-1,)) == 0
    for N in (1, 2):
        e = A.EmbeddingVarpi(N)
        vals = [abs(A.u_N_r_integral(e, r, (-1,))) / (1 + np.log(r)) for r in (2, 4, 8, 16, 32, 64)]
        assert np.all(np.isfinite(vals)) and max(vals) < 10


def test_wilson_interval():
    lo, hi = A.wilson_interval(50, 100)
    assert lo < 0.5 < hi and hi - lo < 0.25
    assert A.wilson_interval(0, 20)[0] == 0


def test_mc_tables_monotone_and_ubar_high():
    confs = [sample_ginibre(32, replica_rng(2, r)).points for r in range(200)]
    k_grid = [0.5, 1, 2, 4, 8]
    rows = A.mc_assumption_tables(confs, "ginibre", 32, PL, A.PotentialPair("ginibre"), "Ubar", k_grid, [1])
    est = [r["estimate"] for r in rows]
    assert est == sorted(est)
    assert all(r["ci_lo"] <= r["estimate"] <= r["ci_hi"] for r in rows)
    k_star = next(r["k"] for r in rows if r["estimate"] >= 0.9)
    assert k_star <= 8
    hrows = A.mc_assumption_tables(confs[:30], "ginibre", 32, PL, A.PotentialPair("ginibre"), "H", k_grid, [1, 2])
    for r0 in (1, 2):
        e = [r["estimate"] for r in hrows if r["r"] == r0]
        assert e == sorted(e)
    assert set(rows[0]) == set(A.TABLE_COLUMNS)
