"""Sine and Ginibre kernels, finite-N circular analogues and cluster functions.

Quaternion-valued kernels (beta = 1, 4) are returned as coefficient arrays
with a trailing axis of length 4 by the vectorised ``*_coeffs`` helpers and
as :class:`~loggas.quaternion.Quaternion` by the scalar entry points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy import special

from .errors import OffLattice, RouteMismatch
from .quaternion import Quaternion, QuaternionMatrix, from_complex_2x2

__all__ = [
    "sgn", "sine_S", "sine_D", "sine_I", "ksin", "ksin_coeffs",
    "FiniteNParams", "sine_SN", "sine_DN", "sine_IN", "sine_JN", "ksinN", "ksinN_coeffs",
    "cluster_TN", "cluster_TN_closed", "cluster_TN_quaternion", "cluster_TN_fourier",
    "fourier_coefficients", "fourier_TN", "fourier_TN_lattice", "fourier_TN_sup", "rho1_at_zero",
    "kgin", "kginN", "kgin_monomial", "kgin_tail", "e_partial", "e_partial_scaled",
    "gaussian_to_lebesgue", "lebesgue_to_gaussian", "KernelSpec", "ROUTE_TOL",
]

ROUTE_TOL = 1e-9
_BETAS = (1, 2, 4)


def _check_beta(beta: int) -> None:
    if beta not in _BETAS:
        raise ValueError(f"beta must be one of {_BETAS}, got {beta}")


def sgn(x):
    """Sign with ``sgn(0) = 0``."""
    return np.sign(x)


def sine_S(x):
    return np.sinc(x)


def sine_D(x):
    x = np.asarray(x, dtype=float)
    px = np.pi * x
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    closed = (np.pi * xs * np.cos(np.pi * xs) - np.sin(np.pi * xs)) / (np.pi * xs**2)
    # Taylor: S'(x) = -pi^2 x/3 + pi^4 x^3/30
    series = -np.pi * px / 3 + np.pi * px**3 / 30
    out = np.where(small, series, closed)
    return out if out.ndim else float(out)


def sine_I(x):
    """Integral of S from 0 to x, i.e. Si(pi x)/pi."""
    x = np.asarray(x, dtype=float)
    out = special.sici(np.pi * x)[0] / np.pi
    return out if out.ndim else float(out)


def _theta_coeffs(a, b, c, d):
    """Quaternion coefficients of [[a, b], [c, d]], broadcasting."""
    return np.stack(
        np.broadcast_arrays((a + d) / 2, -1j * (a - d) / 2, (b - c) / 2, -1j * (b + c) / 2),
        axis=-1,
    ).astype(complex)


def _template(beta, S, D, I, J, x):
    if beta == 2:
        return S(x)
    if beta == 1:
        return _theta_coeffs(S(x), D(x), J(x), S(x))
    y = 2 * np.asarray(x, dtype=float)
    return 0.5 * _theta_coeffs(S(y), D(y), I(y), S(y))


def ksin_coeffs(beta: int, x):
    """Vectorised sine kernel: real array for beta=2, ``(..., 4)`` coefficients otherwise."""
    _check_beta(beta)
    return _template(beta, sine_S, sine_D, sine_I, lambda t: sine_I(t) - 0.5 * sgn(t), x)


def ksin(beta: int, x: float):
    v = ksin_coeffs(beta, float(x))
    return float(v) if beta == 2 else Quaternion.from_array(v)


@dataclass(frozen=True)
class FiniteNParams:
    """Torus size and frequency sets of the finite-N circular approximation.

    ``n`` must be even so that ``P_N`` consists of half-integers and avoids 0.
    """

    n: int
    N: Optional[int] = None
    P: np.ndarray = field(init=False, repr=False, compare=False)
    P4: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ValueError(f"torus size must be an even integer >= 2, got {self.n}")
        P = -(self.n + 1) / 2 + np.arange(1, self.n + 1)
        P4 = np.arange(-self.n, self.n) + 0.5
        P.setflags(write=False)
        P4.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "P4", P4)

    @classmethod
    def from_level(cls, N: int, torus_size: Optional[int] = None) -> "FiniteNParams":
        """Level N with ``n = 2**(4N)`` unless ``torus_size`` overrides it."""
        return cls(n=int(torus_size) if torus_size else 2 ** (4 * N), N=N)

    @property
    def Ppos(self) -> np.ndarray:
        return self.P[self.P > 0]


_CHUNK = 1 << 22


def _trig_sum(params: FiniteNParams, x, weights, fn):
    """sum_{p>0} weights(p) * fn(2 pi x p / n), chunked over x."""
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    p = params.Ppos
    w = weights(p)
    out = np.empty(flat.shape)
    step = max(1, _CHUNK // p.size)
    for s in range(0, flat.size, step):
        arg = np.multiply.outer(flat[s:s + step], 2 * np.pi * p / params.n)
        out[s:s + step] = fn(arg) @ w
    return out.reshape(x.shape)


def _scalar(out):
    return out if np.ndim(out) else float(out)


def sine_SN(params: FiniteNParams, x):
    """sin(pi x)/(n sin(pi x/n)) with the removable points filled from the Fourier form."""
    x = np.asarray(x, dtype=float)
    n = params.n
    den = np.sin(np.pi * x / n)
    near = np.abs(den) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(np.pi * x) / (n * den)
    if np.any(near):
        out = np.where(near, _sine_SN_fourier(params, x) if x.ndim else _sine_SN_fourier(params, float(x)), out)
    return _scalar(out)


def _sine_SN_fourier(params, x):
    return (2.0 / params.n) * _trig_sum(params, x, np.ones_like, np.cos)


def sine_DN(params: FiniteNParams, x):
    return _scalar(-(4 * np.pi / params.n**2) * _trig_sum(params, x, lambda p: p, np.sin))


def sine_IN(params: FiniteNParams, x):
    return _scalar(_trig_sum(params, x, lambda p: 1.0 / p, np.sin) / np.pi)


def sine_JN(params: FiniteNParams, x):
    return _scalar(sine_IN(params, x) - 0.5 * sgn(x))


def ksinN_coeffs(beta: int, params: FiniteNParams, x):
    _check_beta(beta)
    return _template(
        beta,
        lambda t: sine_SN(params, t),
        lambda t: sine_DN(params, t),
        lambda t: sine_IN(params, t),
        lambda t: sine_JN(params, t),
        x,
    )


def ksinN(beta: int, params: FiniteNParams, x: float):
    v = ksinN_coeffs(beta, params, float(x))
    return float(v) if beta == 2 else Quaternion.from_array(v)


def rho1_at_zero(beta: int) -> float:
    """Scalar part of the kernel diagonal; 1/2 for beta=4 with the kernel as defined."""
    _check_beta(beta)
    return 0.5 if beta == 4 else 1.0


def cluster_TN_closed(beta: int, params: FiniteNParams, x):
    _check_beta(beta)
    if beta == 2:
        return sine_SN(params, x) ** 2
    if beta == 1:
        return sine_SN(params, x) ** 2 - sine_DN(params, x) * sine_JN(params, x)
    y = 2 * np.asarray(x, dtype=float)
    return 0.25 * (sine_SN(params, y) ** 2 - sine_DN(params, y) * sine_IN(params, y))


def cluster_TN_quaternion(beta: int, params: FiniteNParams, x):
    """Scalar part of K(x) K(-x) via 2x2 matrix products."""
    _check_beta(beta)
    x = np.asarray(x, dtype=float)
    if beta == 2:
        return sine_SN(params, x) * sine_SN(params, -x)
    a = ksinN_coeffs(beta, params, x)
    b = ksinN_coeffs(beta, params, -x)
    # scalar part of a*b in coefficients: a0 b0 - a1 b1 - a2 b2 - a3 b3
    prod = a[..., 0] * b[..., 0] - a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2] - a[..., 3] * b[..., 3]
    return _scalar(np.real_if_close(prod, tol=1e6).real if np.iscomplexobj(prod) else prod)


def cluster_TN(beta: int, params: FiniteNParams, x, check: bool = True):
    """Two-level cluster function of the finite-N circular beta-ensemble.

    Evaluates the closed form and, with ``check``, the quaternion product
    route, raising :class:`RouteMismatch` when they differ by more than
    ``ROUTE_TOL``.
    """
    closed = cluster_TN_closed(beta, params, x)
    if check:
        quat = cluster_TN_quaternion(beta, params, x)
        err = float(np.max(np.abs(np.asarray(closed) - np.asarray(quat)), initial=0.0))
        if err > ROUTE_TOL:
            raise RouteMismatch(f"beta={beta}, n={params.n}: routes differ by {err:.3e}")
    return closed


def fourier_coefficients(beta: int, params: FiniteNParams):
    """Integer frequencies m and coefficients c_m of the finite double sum.

    beta=2: T(x) = sum_m c_m e^{2 pi i x m/n} with c_m = #{p+q=m}/n^2.
    beta=1: the same series with c_m = sum_{p+q=m} (1 - p/q)/n^2 is S^2 - D I;
    the remaining 1/2 sgn(x) D_N(x) term is added by :func:`cluster_TN_fourier`.
    beta=4: (1/4) of the beta=1 double sum evaluated at 2x.
    """
    _check_beta(beta)
    n = params.n
    P = params.P
    ones = np.ones(n)
    count = np.convolve(ones, ones)
    m = np.arange(-(n - 1), n)
    if beta == 2:
        return m, count / n**2
    cross = np.convolve(P, 1.0 / P)
    c = (count - cross) / n**2
    return m, (c if beta == 1 else 0.25 * c)


def cluster_TN_fourier(beta: int, params: FiniteNParams, x):
    """Cluster function from the finite Fourier double sums over P_N."""
    x = np.asarray(x, dtype=float)
    m, c = fourier_coefficients(beta, params)
    y = 2 * x if beta == 4 else x
    # c_m = c_{-m}, so the series is a cosine sum
    out = np.cos(np.multiply.outer(y, 2 * np.pi * m / params.n)) @ c
    if beta == 1:
        out = out + 0.5 * sgn(x) * sine_DN(params, x)
    return _scalar(out)


def _lattice_index(params: FiniteNParams, xi) -> int:
    n = params.n
    if isinstance(xi, Fraction):
        k = xi * n
        if k.denominator != 1:
            raise OffLattice(f"{xi} is not on the lattice Z/{n}")
        k = int(k)
    else:
        kf = float(xi) * n
        k = int(round(kf))
        if abs(kf - k) > 1e-9:
            raise OffLattice(f"{xi} is not on the lattice Z/{n}")
    if not (-n * n / 2 < k <= n * n / 2):
        raise OffLattice(f"k={k} outside (-n^2/2, n^2/2]")
    return k


def _sgn_term(params: FiniteNParams, k: np.ndarray) -> np.ndarray:
    """Transform of 1/2 sgn(x) D_N(x) at xi = k/n: -(1/n) sum_p p/(p-k)."""
    P = params.P
    out = np.empty(k.shape)
    step = max(1, _CHUNK // P.size)
    for s in range(0, k.size, step):
        out[s:s + step] = (P / np.subtract.outer(P, k[s:s + step]).T).sum(axis=1)
    return -out / params.n


def fourier_TN_lattice(beta: int, params: FiniteNParams, k=None):
    """Exact transform of the cluster function at xi = k/n.

    Defaults to the whole lattice ``-n^2/2 < k <= n^2/2``; returns ``(k, F)``.
    """
    n = params.n
    if k is None:
        k = np.arange(-n * n // 2 + 1, n * n // 2 + 1)
    k = np.asarray(k, dtype=np.int64)
    m, c = fourier_coefficients(beta, params)
    F = np.zeros(k.shape)
    if beta == 4:
        even = (k % 2 == 0) & (np.abs(k // 2) <= n - 1)
        F[even] = n * c[k[even] // 2 + n - 1]
    else:
        inside = np.abs(k) <= n - 1
        F[inside] = n * c[k[inside] + n - 1]
    if beta == 1:
        F = F + _sgn_term(params, k.astype(float))
    return k, F


def fourier_TN(beta: int, params: FiniteNParams, xi) -> float:
    """Transform of the cluster function at one lattice frequency ``xi`` (Fraction or float)."""
    _check_beta(beta)
    k = _lattice_index(params, xi)
    return float(fourier_TN_lattice(beta, params, [k])[1][0])


def fourier_TN_sup(beta: int, params: FiniteNParams) -> float:
    return float(np.max(np.abs(fourier_TN_lattice(beta, params)[1])))


# Ginibre kernels ---------------------------------------------------------------------------


def e_partial_scaled(N: int, s):
    """e^{-s} sum_{k<=N} s^k/k!, i.e. the regularised upper incomplete gamma Q(N+1, s)."""
    return special.gammaincc(N + 1, np.asarray(s, dtype=float))


def e_partial(N: int, s):
    """Partial exponential sum sum_{k=0}^N s^k/k! for s >= 0."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("e_partial requires s >= 0")
    if N == 0:
        return _scalar(np.ones_like(s))
    return _scalar(np.exp(s) * e_partial_scaled(N, s))


def _monomial_scaled(N: int, u, m):
    """e^{-m} sum_{k<N} u^k/k! for complex u, evaluated termwise in log space."""
    u = np.asarray(u, dtype=complex)
    m = np.asarray(m, dtype=float)
    k = np.arange(N)
    logu = np.log(np.where(u == 0, 1.0, u))
    terms = np.exp(k * logu[..., None] - special.gammaln(k + 1) - m[..., None])
    terms[..., 1:] = np.where((u == 0)[..., None], 0.0, terms[..., 1:])
    return terms.sum(axis=-1)


def kgin(z1, z2):
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    out = np.exp(-np.abs(z1) ** 2 / 2 - np.abs(z2) ** 2 / 2 + z1 * np.conj(z2)) / np.pi
    return out if out.ndim else complex(out)


def kginN(N: int, z1, z2):
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    m = (np.abs(z1) ** 2 + np.abs(z2) ** 2) / 2
    out = _monomial_scaled(N, z1 * np.conj(z2), m) / np.pi
    return out if out.ndim else complex(out)


def kgin_monomial(N: int, w, z):
    """K_N(w, z) = sum_{k<N} (w conj z)^k/k!, against the Gaussian reference measure."""
    u = np.asarray(w, dtype=complex) * np.conj(np.asarray(z, dtype=complex))
    out = _monomial_scaled(N, u, np.zeros(u.shape))
    return out if out.ndim else complex(out)


def kgin_tail(N: int, w, z):
    """K*_N(w, z) = sum_{k>=N} (w conj z)^k/k!.

    Real nonnegative arguments use e^u P(N, u); otherwise the tail series is
    summed directly when it converges quickly and by complement when not.
    """
    u = np.asarray(w, dtype=complex) * np.conj(np.asarray(z, dtype=complex))
    out = np.empty(u.shape, dtype=complex)
    real = (np.abs(u.imag) == 0) & (u.real >= 0)
    ur = u.real[real]
    out[real] = np.exp(ur) * special.gammainc(N, ur) if N > 0 else np.exp(ur)
    rest = ~real
    if np.any(rest):
        ui = u[rest]
        fast = np.abs(ui) < 0.5 * N
        val = np.exp(ui) - _monomial_scaled(N, ui, np.zeros(ui.shape))
        if np.any(fast):
            val[fast] = _tail_series(N, ui[fast])
        out[rest] = val
    return out if out.ndim else complex(out)


def _tail_series(N: int, u: np.ndarray) -> np.ndarray:
    logu = np.log(np.where(u == 0, 1.0, u))
    term = np.where(u == 0, 0.0, np.exp(N * logu - special.gammaln(N + 1)))
    total = term.copy()
    k = N
    while np.any(np.abs(term) > 1e-18 * np.maximum(np.abs(total), 1e-300)):
        k += 1
        term = term * u / k
        total += term
    return total


def gaussian_to_lebesgue(rho, points):
    """Convert an n-point density against g(dz) = e^{-|z|^2} dz/pi to Lebesgue."""
    z = np.asarray(points, dtype=complex)
    return rho * np.exp(-np.sum(np.abs(z) ** 2)) / np.pi ** z.size


def lebesgue_to_gaussian(rho, points):
    z = np.asarray(points, dtype=complex)
    return rho * np.pi ** z.size * np.exp(np.sum(np.abs(z) ** 2))


# Kernel specifications ---------------------------------------------------------------------

_KINDS = ("sine", "sine_finite", "ginibre", "ginibre_finite", "ginibre_tail", "ginibre_monomial")


@dataclass(frozen=True)
class KernelSpec:
    """Tagged description of a kernel and the reference measure it is taken against.

    ``measure`` is ``"lebesgue"`` or ``"gaussian"``; Gaussian means
    g(dz) = e^{-|z|^2} dz / pi.
    """

    kind: str
    beta: Optional[int] = None
    params: Optional[FiniteNParams] = None
    N: Optional[int] = None
    measure: str = "lebesgue"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind.startswith("sine"):
            _check_beta(self.beta)
            if self.measure != "lebesgue":
                raise ValueError("sine kernels are taken against Lebesgue measure")
        if self.kind == "sine_finite" and self.params is None:
            raise ValueError("sine_finite needs FiniteNParams")
        if self.kind in ("ginibre_finite", "ginibre_tail", "ginibre_monomial") and not self.N:
            raise ValueError(f"{self.kind} needs N >= 1")
        if self.measure not in ("lebesgue", "gaussian"):
            raise ValueError(f"unknown measure {self.measure!r}")

    @classmethod
    def sine(cls, beta: int) -> "KernelSpec":
        return cls("sine", beta=beta)

    @classmethod
    def sine_finite(cls, beta: int, params: FiniteNParams) -> "KernelSpec":
        return cls("sine_finite", beta=beta, params=params)

    @classmethod
    def ginibre(cls, measure: str = "lebesgue") -> "KernelSpec":
        return cls("ginibre", measure=measure)

    @classmethod
    def ginibre_finite(cls, N: int, measure: str = "lebesgue") -> "KernelSpec":
        return cls("ginibre_finite", N=N, measure=measure)

    @classmethod
    def ginibre_monomial(cls, N: int) -> "KernelSpec":
        return cls("ginibre_monomial", N=N, measure="gaussian")

    @classmethod
    def ginibre_tail(cls, N: int) -> "KernelSpec":
        return cls("ginibre_tail", N=N, measure="gaussian")

    @property
    def is_quaternion(self) -> bool:
        return self.kind.startswith("sine") and self.beta != 2

    @property
    def translation_invariant(self) -> bool:
        return self.kind in ("sine", "sine_finite")

    def dimension(self) -> int:
        return 1 if self.kind.startswith("sine") else 2

    def kernel(self, x, y):
        """K(x, y) broadcast over arrays; quaternion kinds return ``(..., 4)`` coefficients."""
        if self.kind == "sine":
            return ksin_coeffs(self.beta, np.subtract(x, y))
        if self.kind == "sine_finite":
            return ksinN_coeffs(self.beta, self.params, np.subtract(x, y))
        if self.kind == "ginibre_monomial" or (self.kind == "ginibre_finite" and self.measure == "gaussian"):
            return kgin_monomial(self.N, x, y)
        if self.kind == "ginibre_finite":
            return kginN(self.N, x, y)
        if self.kind == "ginibre_tail":
            k = kgin_tail(self.N, x, y)
            return k if self.measure == "gaussian" else k * _lebesgue_weight(x, y)
        if self.measure == "gaussian":
            return np.exp(np.asarray(x, dtype=complex) * np.conj(np.asarray(y, dtype=complex)))
        return kgin(x, y)

    def gram(self, points):
        """Kernel matrix on ``points``: complex array or :class:`QuaternionMatrix`."""
        pts = np.asarray(points)
        K = self.kernel(pts[:, None], pts[None, :])
        if self.is_quaternion:
            return QuaternionMatrix(np.asarray(K, dtype=complex), self_dual=True)
        return np.asarray(K)


def _lebesgue_weight(x, y):
    return np.exp(-np.abs(np.asarray(x)) ** 2 / 2 - np.abs(np.asarray(y)) ** 2 / 2) / np.pi
