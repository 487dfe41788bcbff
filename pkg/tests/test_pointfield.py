import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from loggas import kernels as K
from loggas import pointfield as P
from loggas.samplers import replica_rng, sample_circular_beta2

ONE_MODE_VAR = {0.5: 0.172270123358771444641370731987, 1.0: 0.232544157934829629701524275189}
M_1_1 = 0.143599079322880982448285304676

P16 = K.FiniteNParams(16)


def bump(width):
    def h(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        inside = np.abs(x) < width
        out[inside] = np.exp(-1 / (1 - (x[inside] / width) ** 2))
        return out
    return h


def disk_indicator(r):
    return P.LinearStatistic(lambda z: np.ones(np.shape(z)), ("disk", r))


# correlation functions


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_rho1_finite_sine(beta):
    # the kernel diagonal scalar part is 1 for beta in {1, 2} and 1/2 for beta = 4
    spec = K.KernelSpec.sine_finite(beta, P16)
    for x in np.linspace(-8, 8, 9):
        assert P.rho_n(spec, [x]) == pytest.approx(K.rho1_at_zero(beta), abs=1e-10)


def test_rho1_ginibre():
    spec = K.KernelSpec.ginibre()
    for z in (0, 1 + 1j, -3j, 10.0):
        assert P.rho_n(spec, [z]) == pytest.approx(1 / np.pi, abs=1e-12)


@pytest.mark.parametrize("spec", [K.KernelSpec.sine_finite(2, P16), K.KernelSpec.sine_finite(1, P16),
                                  K.KernelSpec.sine_finite(4, P16), K.KernelSpec.ginibre()])
def test_rho2_coincident_is_zero(spec):
    x = 0.7 + (0.2j if not spec.kind.startswith("sine") else 0)
    assert abs(P.rho_n(spec, [x, x])) <= 1e-12


@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2, 4]), st.integers(2, 5))
def test_rho_n_permutation_invariant(seed, beta, m):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-6, 6, m)
    spec = K.KernelSpec.sine_finite(beta, P16)
    assert P.rho_n(spec, pts[rng.permutation(m)]) == pytest.approx(P.rho_n(spec, pts), abs=1e-12)


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_two_level_cluster_matches_cluster_TN(beta):
    spec = K.KernelSpec.sine_finite(beta, P16)
    rng = np.random.default_rng(beta)
    for x, y in rng.uniform(-4, 4, (20, 2)):
        assert P.two_level_cluster(spec, x, y) == pytest.approx(float(K.cluster_TN(beta, P16, x - y)), abs=1e-9)


def test_two_level_cluster_examples():
    spec = K.KernelSpec.sine_finite(2, P16)
    assert P.two_level_cluster(spec, 0.3, 0.3) == pytest.approx(1.0, abs=1e-12)
    half = P.two_level_cluster(spec, 4.0, -4.0)
    assert half == pytest.approx(K.sine_SN(P16, 8.0) ** 2, abs=1e-12)


def test_two_level_cluster_ginibre():
    z = 0.8 - 1.1j
    assert P.two_level_cluster(K.KernelSpec.ginibre(), z, 0) == pytest.approx(np.exp(-abs(z) ** 2) / np.pi**2)


def _circular_density(n, pts):
    z = np.exp(2j * np.pi * np.asarray(pts) / n)
    v = np.ones(z.shape[1:]) if z.ndim > 1 else 1.0
    for j, k in itertools.combinations(range(z.shape[0]), 2):
        v = v * np.abs(z[j] - z[k]) ** 2
    return v


@pytest.mark.slow
@pytest.mark.parametrize("n,m", [(2, 200), (4, 24), (6, 14)])
def test_rho_against_brute_force_density(n, m):
    # trapezoid on the torus is exact for trigonometric polynomials of degree < m/2
    grid = -n / 2 + n * np.arange(m) / m
    h = n / m
    mesh = np.meshgrid(*([grid] * n), indexing="ij", sparse=True)
    Z = np.sum(_circular_density(n, np.broadcast_arrays(*mesh))) * h**n
    spec = K.KernelSpec.sine_finite(2, K.FiniteNParams(n))
    rng = np.random.default_rng(n)
    for k in (2, 3) if n > 2 else (2,):
        for _ in range(3):
            fixed = rng.uniform(-n / 2, n / 2, k)
            rest = np.meshgrid(*([grid] * (n - k)), indexing="ij", sparse=True)
            full = [np.full((1,) * max(n - k, 1), f) for f in fixed] + list(rest)
            marg = np.sum(_circular_density(n, np.broadcast_arrays(*full))) * h ** (n - k)
            brute = np.prod(np.arange(n - k + 1, n + 1)) * marg / Z
            assert P.rho_n(spec, fixed) == pytest.approx(brute, rel=1e-9, abs=1e-12)


# linear statistics


def test_mean_zero_statistic():
    h = P.LinearStatistic(lambda x: np.zeros(np.shape(x)), ("interval", -1, 1))
    assert P.mean_linear_stat(K.KernelSpec.sine_finite(2, P16), h) == 0


def test_mean_indicator_exact_and_mc():
    h = P.LinearStatistic(lambda x: np.ones(np.shape(x)), ("interval", -1, 1))
    assert P.mean_linear_stat(K.KernelSpec.sine_finite(2, P16), h) == pytest.approx(2.0, abs=1e-10)
    samples = [sample_circular_beta2(16, replica_rng(3, r)) for r in range(10_000)]
    counts = np.array([h.evaluate(c) for c in samples])
    assert abs(counts.mean() - 2.0) <= 3 * counts.std(ddof=1) / np.sqrt(counts.size)


def test_linear_statistic_rejects_unbounded():
    with pytest.raises(ValueError), np.errstate(divide="ignore"):
        P.LinearStatistic(lambda x: 1 / x, ("interval", -1, 1))


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_var_fourier_zero_and_constant(beta):
    assert P.var_linear_stat_fourier(P16, beta, lambda x: np.zeros_like(x)) == 0
    # the total count of a saturated torus is deterministic
    assert abs(P.var_linear_stat_fourier(P16, beta, lambda x: np.ones_like(x))) <= 1e-8


@pytest.mark.parametrize("beta", [2, 4])
def test_var_fourier_matches_direct(beta):
    h = bump(2.0)
    assert P.var_linear_stat_fourier(P16, beta, h) == pytest.approx(
        P.var_linear_stat_direct(P16, beta, h, (-2, 2)), rel=1e-6)


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=4), st.floats(0.5, 6), st.sampled_from([1, 2, 4]))
def test_var_fourier_nonnegative(coefs, width, beta):
    b = bump(width)
    h = lambda x: b(x) * sum(c * np.cos((j + 1) * x) for j, c in enumerate(coefs))
    assert P.var_linear_stat_fourier(P16, beta, h) >= -1e-12


# planar variance


def test_var_quadrature_zero():
    g = P.LinearStatistic(lambda z: np.zeros(np.shape(z)), ("disk", 1.0))
    assert P.var_determinantal_quadrature(g, K.KernelSpec.ginibre_monomial(3)).value == 0


@pytest.mark.parametrize("r", sorted(ONE_MODE_VAR))
def test_var_quadrature_one_mode(r):
    res = P.var_determinantal_quadrature(disk_indicator(r), K.KernelSpec.ginibre_monomial(1))
    assert res.value == pytest.approx(ONE_MODE_VAR[r], abs=1e-10)


@given(st.floats(0.2, 3), st.integers(1, 6), st.floats(-1, 1))
def test_var_quadrature_bound(r, N, a):
    g = P.LinearStatistic(lambda z: np.exp(1j * a * z.real) * (1 + 0.5 * np.abs(z)), ("disk", r))
    res = P.var_determinantal_quadrature(g, K.KernelSpec.ginibre_monomial(N))
    assert 0 <= res.value <= res.bound * (1 + 1e-9)


def test_M_small_r():
    assert P.M_N_r(3, 0.0) == 0 and P.M_N_r(3, 1e-4) < 1e-20
    assert P.M_bound(3, 1e-4) < 1e-20


def test_M_closed_form_vs_quadrature():
    assert P.M_N_r(1, 1.0) == pytest.approx(M_1_1, rel=1e-13)
    assert P.M_N_r_quadrature(1, 1.0) == pytest.approx(M_1_1, abs=1e-8)


@pytest.mark.parametrize("N", range(1, 9))
def test_M_bound_grid(N):
    for r in (0.5, 1, 2, 4):
        assert P.M_bound(N, r) - abs(P.M_N_r(N, r)) >= -1e-9


def test_decomposition_zero():
    g = P.LinearStatistic(lambda z: np.zeros(np.shape(z)), ("disk", 1.0))
    assert P.var_decomposition_check(2, g)["residual"] == 0


@pytest.mark.parametrize("N,r", [(2, 1.0), (4, 2.0), (8, 3.0)])
def test_decomposition_residual(N, r):
    rep = P.var_decomposition_check(N, P.h_r(r))
    assert abs(rep["residual"]) <= 1e-6
    assert rep["M"] == pytest.approx(P.M_N_r(N, r), abs=1e-8)


def test_rotation_variance_trivia():
    assert P.var_rotation_statistic(4, 0.0) == 0
    assert abs(P.mean_linear_stat(K.KernelSpec.ginibre_finite(8), P.h_r(1.5))) <= 1e-12


def test_rotation_variance_over_r_bounded():
    ratios = [P.var_rotation_statistic(2 * r * r, r) / r for r in (1, 2, 4)]
    assert max(ratios) <= 2 * ratios[0]
