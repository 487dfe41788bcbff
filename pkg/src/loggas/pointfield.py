"""Correlation functions and variances of linear statistics.

Every density returned here is taken against the reference measure recorded
on the :class:`~loggas.kernels.KernelSpec`; use
:func:`~loggas.kernels.gaussian_to_lebesgue` to convert.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, special

from .errors import QuadratureNotConverged, UnsupportedSpec
from .kernels import (
    FiniteNParams, KernelSpec, cluster_TN, e_partial_scaled, fourier_TN_lattice, rho1_at_zero,
)
from .quaternion import qdet

__all__ = [
    "Domain", "Configuration", "LinearStatistic", "DiskQuadrature", "QuadratureResult",
    "rho_n", "two_level_cluster", "mean_linear_stat", "var_linear_stat_fourier",
    "var_linear_stat_direct", "var_determinantal_quadrature", "M_N_r", "M_N_r_quadrature",
    "M_bound", "var_decomposition_check", "var_rotation_statistic", "rotation_statistic",
    "h_r",
]


@dataclass(frozen=True)
class Domain:
    """``kind`` is one of window (``[-size, size]``), torus (size n), disk (radius), line, plane."""

    kind: str = "line"
    size: Optional[float] = None

    def contains(self, pts) -> bool:
        pts = np.asarray(pts)
        if self.kind == "window":
            return bool(np.all(np.abs(pts) <= self.size))
        if self.kind == "torus":
            return bool(np.all((pts > -self.size / 2) & (pts <= self.size / 2)))
        if self.kind == "disk":
            return bool(np.all(np.abs(pts) <= self.size))
        return True


@dataclass
class Configuration:
    points: np.ndarray
    domain: Domain = field(default_factory=Domain)
    measure: str = "lebesgue"

    def __post_init__(self):
        self.points = np.asarray(self.points)
        if not self.domain.contains(self.points):
            raise ValueError(f"points outside declared domain {self.domain}")

    def __len__(self) -> int:
        return self.points.size

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.points)

    def pair(self, f: Callable) -> float:
        """<s, f> = sum_i f(s_i)."""
        return np.sum(f(self.points)) if self.points.size else 0.0


@dataclass
class LinearStatistic:
    """Test function with bounded support.

    ``support`` is ``("interval", a, b)`` or ``("disk", R)``.
    """

    f: Callable
    support: tuple

    def __post_init__(self):
        probe = self.f(self._probe_points())
        if not np.all(np.isfinite(probe)):
            raise ValueError("linear statistic is not bounded on its support")

    def _probe_points(self):
        if self.support[0] == "interval":
            return np.linspace(self.support[1], self.support[2], 257)
        R = self.support[1]
        rr, tt = np.meshgrid(np.linspace(0, R, 33), np.linspace(-np.pi, np.pi, 33))
        return (rr * np.exp(1j * tt)).ravel()

    def __call__(self, x):
        x = np.asarray(x)
        if self.support[0] == "interval":
            inside = (x >= self.support[1]) & (x <= self.support[2])
        else:
            inside = np.abs(x) <= self.support[1]
        out = np.zeros(x.shape, dtype=np.result_type(self.f(x[:1]) if x.size else float, float))
        if np.any(inside):
            out[inside] = self.f(x[inside])
        return out

    def evaluate(self, config: Configuration):
        return np.sum(self(config.points))


# correlation functions ---------------------------------------------------------------------


def rho_n(spec: KernelSpec, points: Sequence) -> float:
    """n-point correlation function: det (or qdet) of the kernel Gram matrix."""
    pts = np.asarray(points)
    if pts.size == 0:
        return 1.0
    G = spec.gram(pts)
    val = qdet(G) if spec.is_quaternion else np.linalg.det(G)
    return float(np.real(val))


def two_level_cluster(spec: KernelSpec, x, y, check: bool = True) -> float:
    """rho^1(x) rho^1(y) - rho^2(x, y); for beta=2 this is |K(x, y)|^2."""
    val = rho_n(spec, [x]) * rho_n(spec, [y]) - rho_n(spec, [x, y])
    if check and spec.kind == "sine_finite":
        ref = float(cluster_TN(spec.beta, spec.params, float(np.real(x - y))))
        if abs(ref - val) > 1e-9:
            raise AssertionError(f"two-level cluster {val} != cluster_TN {ref}")
    return val


# disk quadrature --------------------------------------------------------------------------


@dataclass(frozen=True)
class DiskQuadrature:
    """Gauss-Legendre in radius times uniform trapezoid in angle on a disk.

    ``w`` are weights for Lebesgue area measure; the angular rule is exact
    for trigonometric polynomials of degree < ``na``.
    """

    R: float
    nr: int = 96
    na: int = 96

    @property
    def nodes(self):
        x, wx = np.polynomial.legendre.leggauss(self.nr)
        rho = 0.5 * self.R * (x + 1)
        wr = 0.5 * self.R * wx * rho
        phi = -np.pi + 2 * np.pi * (np.arange(self.na) + 0.5) / self.na
        z = np.multiply.outer(rho, np.exp(1j * phi)).ravel()
        w = np.repeat(wr * 2 * np.pi / self.na, self.na)
        return z, w

    def refined(self) -> "DiskQuadrature":
        return DiskQuadrature(self.R, int(np.ceil(1.5 * self.nr)), int(np.ceil(1.5 * self.na)))

    def integrate(self, f) -> complex:
        z, w = self.nodes
        return np.sum(f(z) * w)


def _modes(z: np.ndarray, k0: int, k1: int) -> np.ndarray:
    """phi_k(z) = z^k e^{-|z|^2/2}/sqrt(k!) for k0 <= k < k1, via the stable recurrence."""
    out = np.empty((k1 - k0, z.size), dtype=complex)
    cur = np.exp(-np.abs(z) ** 2 / 2).astype(complex)
    for k in range(1, k0 + 1):
        cur = cur * z / np.sqrt(k)
    for i, k in enumerate(range(k0, k1)):
        if i:
            cur = cur * z / np.sqrt(k)
        out[i] = cur
    return out


@dataclass
class QuadratureResult:
    value: float
    bound: float
    refined_value: float
    grid: tuple
    measure: str = "gaussian"

    def __float__(self) -> float:
        return self.value


def _mode_range(spec: KernelSpec, R: float) -> tuple[int, int]:
    kmax = int(np.ceil(R * R + 12 * R + 40))
    if spec.kind in ("ginibre_monomial", "ginibre_finite"):
        return 0, spec.N
    if spec.kind == "ginibre_tail":
        return spec.N, max(kmax, spec.N + 40)
    if spec.kind == "ginibre":
        return 0, kmax
    raise UnsupportedSpec(f"variance quadrature needs a Ginibre-type spec, got {spec.kind}")


def _support_radius(g: LinearStatistic) -> float:
    if g.support[0] != "disk":
        raise UnsupportedSpec("planar variance needs a disk-supported statistic")
    return float(g.support[1])


def _default_grid(R: float, k1: int) -> DiskQuadrature:
    nr = max(96, int(k1 / 2) + 48)
    na = max(96, 2 * k1 + 8)
    return DiskQuadrature(R, nr, na)


def _variance_on_grid(g, quad: DiskQuadrature, k0: int, k1: int) -> float:
    z, w = quad.nodes
    gz = g(z)
    P = _modes(z, k0, k1)
    diag = np.sum(np.abs(gz) ** 2 * np.sum(np.abs(P) ** 2, axis=0) * w) / np.pi
    C = (P * (gz * w / np.pi)) @ P.conj().T
    return float(diag - np.sum(np.abs(C) ** 2))


def var_determinantal_quadrature(g: LinearStatistic, spec: KernelSpec, quad: Optional[DiskQuadrature] = None,
                                 rtol: float = 1e-6) -> QuadratureResult:
    """Variance of <s, g> for a Ginibre-type kernel by mode expansion on a disk grid.

    Writes K(w, z) = sum_k (w conj z)^k / k! over the kernel's mode range, so
    the double integral becomes sum_{k,l} |C_kl|^2 with
    C_kl = (1/pi) int g phi_k conj(phi_l) dz. One refinement level is
    compared; relative disagreement above ``rtol`` raises.
    """
    R = _support_radius(g)
    k0, k1 = _mode_range(spec, R)
    bound_val = 2 / np.pi * DiskQuadrature(R).integrate(lambda z: np.abs(g(z)) ** 2).real
    if R == 0 or k1 <= k0:
        return QuadratureResult(0.0, float(bound_val), 0.0, (0, 0))
    quad = quad or _default_grid(R, k1)
    v0 = _variance_on_grid(g, quad, k0, k1)
    fine = quad.refined()
    v1 = _variance_on_grid(g, fine, k0, k1)
    scale = max(abs(v1), 1e-300)
    if abs(v1 - v0) > rtol * scale and abs(v1 - v0) > 1e-13:
        raise QuadratureNotConverged(f"variance {v0} vs refined {v1}")
    if v1 > bound_val * (1 + 1e-9) + 1e-12:
        raise AssertionError(f"variance {v1} exceeds bound {bound_val}")
    return QuadratureResult(v1, float(bound_val), v0, (fine.nr, fine.na))


# rotation statistic and the M term ----------------------------------------------------------


def h_r(r: float, f: Optional[Callable] = None) -> LinearStatistic:
    """1_{D_r}(z) e^{i arg z} f(z), with ``f`` defaulting to 1."""
    if f is None:
        fn = lambda z: np.exp(1j * np.angle(z))
    else:
        fn = lambda z: np.exp(1j * np.angle(z)) * f(z)
    return LinearStatistic(fn, ("disk", float(r)))


rotation_statistic = h_r


def M_N_r(N: int, r: float) -> float:
    """Closed form gamma(N+1/2, r^2)^2 / ((N-1)! N!), with gamma the lower incomplete gamma."""
    if r <= 0:
        return 0.0
    a = N + 0.5
    log_gamma = np.log(special.gammainc(a, r * r)) + special.gammaln(a)
    return float(np.exp(2 * log_gamma - special.gammaln(N) - special.gammaln(N + 1)))


def _cross_sum(g, quad: DiskQuadrature, N: int, kmax: int) -> float:
    z, w = quad.nodes
    P = _modes(z, 0, kmax)
    C = (P * (g(z) * w / np.pi)) @ P.conj().T
    A = np.abs(C) ** 2
    return float(A[:N, N:].sum() + A[N:, :N].sum())


def M_N_r_quadrature(N: int, r: float, f: Optional[Callable] = None) -> float:
    """M from the cross term 2 Re K_N conj(K*_N) of the defining double integral."""
    if r <= 0:
        return 0.0
    g = h_r(r, f)
    kmax = int(np.ceil(r * r + 12 * r + 40)) + N
    quad = _default_grid(r, kmax)
    return _cross_sum(g, quad, N, kmax)


def M_bound(N: int, r: float) -> float:
    """2 (1 - e^{-r^2} e_{N-1}(r^2)) (1 - e^{-r^2} e_N(r^2))."""
    s = r * r
    return float(2 * (1 - e_partial_scaled(N - 1, s)) * (1 - e_partial_scaled(N, s)))


def var_decomposition_check(N: int, g: LinearStatistic) -> dict:
    """Compare Var^N with Var^mu, Var^{N*} and the cross term M for one statistic.

    The identity that holds is Var^N = Var^mu + M - Var^{N*};
    ``residual_printed`` records the same combination with -M.
    """
    R = _support_radius(g)
    kmax = int(np.ceil(R * R + 12 * R + 40)) + N
    quad = _default_grid(R, kmax)
    v_mu = _variance_on_grid(g, quad, 0, kmax)
    v_N = _variance_on_grid(g, quad, 0, N)
    v_star = _variance_on_grid(g, quad, N, kmax)
    M = _cross_sum(g, quad, N, kmax)
    scale = max(abs(v_N), abs(v_mu), abs(M), 1e-300)
    res = v_N - (v_mu + M - v_star)
    return {
        "N": N, "var_mu": v_mu, "var_N": v_N, "var_Nstar": v_star, "M": M,
        "residual": res, "relative_residual": abs(res) / scale,
        "residual_printed": v_N - (v_mu - M - v_star),
    }


def var_rotation_statistic(N: int, r: float, f: Optional[Callable] = None) -> float:
    """Variance of <s, h_r f> under the N-point Ginibre ensemble."""
    if r <= 0:
        return 0.0
    return var_determinantal_quadrature(h_r(r, f), KernelSpec.ginibre_monomial(N)).value


# one-dimensional periodic fields -----------------------------------------------------------


def _torus_transform(params: FiniteNParams, h: Callable, k: np.ndarray) -> np.ndarray:
    """F(h)(k/n) = int_{T_N} h(x) e^{-2 pi i k x/n} dx by the periodic trapezoid rule."""
    n = params.n
    M = 1 << int(np.ceil(np.log2(max(4 * n * n, 4096))))
    x = -n / 2 + n * np.arange(M) / M
    fft = np.fft.fft(h(x)) * (n / M)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    return sign * fft[np.mod(k, M)]


def var_linear_stat_fourier(params: FiniteNParams, beta: int, h: Callable) -> float:
    """(1/n) sum_xi |F(h)(xi)|^2 m_N(xi) over the lattice xi = k/n, |k| <= n^2/2.

    ``h`` must be supported in T_N = (-n/2, n/2]; m_N = rho^1(0) - F(T).
    """
    k, F = fourier_TN_lattice(beta, params)
    m = rho1_at_zero(beta) - F
    Fh = _torus_transform(params, h, k)
    return float(np.sum(np.abs(Fh) ** 2 * m) / params.n)


def var_linear_stat_direct(params: FiniteNParams, beta: int, h: Callable, support: tuple[float, float],
                           nodes: int = 400) -> float:
    """rho^1 int h^2 - int int h(x) h(y) T(x - y) by Gauss-Legendre on ``support``."""
    a, b = support
    t, wt = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * (b - a) * t + 0.5 * (a + b)
    w = 0.5 * (b - a) * wt
    hx = h(x)
    T = cluster_TN(beta, params, np.subtract.outer(x, x), check=False)
    return float(rho1_at_zero(beta) * np.sum(w * hx**2) - (w * hx) @ T @ (w * hx))


def mean_linear_stat(source, h: LinearStatistic) -> float:
    """Mean of <s, h>.

    ``source`` is a :class:`KernelSpec` (exact) or a sequence of
    configurations (Monte Carlo; returns the sample mean).
    """
    if not isinstance(source, KernelSpec):
        vals = [h.evaluate(c) if isinstance(c, Configuration) else np.sum(h(np.asarray(c))) for c in source]
        return float(np.mean(vals))
    spec = source
    if spec.kind in ("sine", "sine_finite"):
        if h.support[0] != "interval":
            raise UnsupportedSpec("sine fields need an interval-supported statistic")
        a, b = h.support[1], h.support[2]
        if spec.kind == "sine_finite" and (a < -spec.params.n / 2 or b > spec.params.n / 2):
            raise UnsupportedSpec("statistic support must lie in T_N")
        brk = [p for p in (-1, 1) if a < p < b]
        val, _ = integrate.quad(lambda t: float(np.real(h(np.array([t]))[0])), a, b, points=brk or None, limit=200)
        return rho1_at_zero(spec.beta) * val
    if spec.kind == "ginibre_tail":
        raise UnsupportedSpec("the tail kernel alone is not a point field")
    R = _support_radius(h)
    quad = DiskQuadrature(R, 128, 128)
    if spec.kind == "ginibre":
        return float(np.real(quad.integrate(h)) / np.pi)
    N = spec.N
    dens = lambda z: special.gammaincc(N, np.abs(z) ** 2) / np.pi
    return float(np.real(quad.integrate(lambda z: h(z) * dens(z))))
