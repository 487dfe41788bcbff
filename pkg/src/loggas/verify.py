"""Deterministic cross-checks grouped into suites for ``loggas verify``."""
from __future__ import annotations

from typing import Callable

import numpy as np

from . import assumptions as A
from . import kernels as K
from . import pointfield as P
from .quaternion import QuaternionMatrix, complexify, qdet

SUITES = ("quaternion", "kernels", "variance", "assumptions", "bounds")


def _check(name: str, anchor: str, value: float, tol: float, mode: str = "le") -> dict:
    ok = value <= tol if mode == "le" else value >= tol
    return {"name": name, "anchor": anchor, "value": float(value), "tolerance": float(tol),
            "comparison": "<=" if mode == "le" else ">=", "pass": bool(ok)}


def random_self_dual(n: int, rng: np.random.Generator, kind: str = "real") -> QuaternionMatrix:
    """Random self-dual matrix; ``kind`` is real, kernel (q0,q2 real; q1,q3 imaginary) or complex."""
    c = np.zeros((n, n, 4), complex)
    flip = np.array([1, -1, -1, -1])
    for i in range(n):
        for j in range(i, n):
            if kind == "real":
                v = rng.standard_normal(4).astype(complex)
            elif kind == "kernel":
                v = np.array([1, 1j, 1, 1j]) * rng.standard_normal(4)
            else:
                v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            if i == j:
                v[1:] = 0
            c[i, j] = v
            c[j, i] = v * flip
    return QuaternionMatrix(c)


def suite_quaternion(seed: int = 0) -> list[dict]:
    rng = np.random.default_rng(seed)
    rel = imag = 0.0
    for t in range(100):
        A_ = random_self_dual(1 + t % 5, rng, "real" if t % 2 else "kernel")
        q = qdet(A_)
        d = np.linalg.det(complexify(A_))
        rel = max(rel, abs(q * q - d) / (1 + abs(d)))
        imag = max(imag, abs(q.imag) / (1 + abs(q)))
    S = rng.standard_normal((5, 5))
    S = S + S.T
    scal = abs(qdet(QuaternionMatrix.from_scalar(S)) - np.linalg.det(S))
    A_ = random_self_dual(5, rng)
    perm = rng.permutation(5)
    pinv = abs(qdet(A_) - qdet(A_.permuted(perm)))
    return [
        _check("qdet^2 vs det(complexify), 100 draws", "qdet squared equals complex determinant", rel, 1e-8),
        _check("imaginary part of qdet", "qdet real for self-dual kernel-class input", imag, 1e-10),
        _check("scalar matrix qdet vs det", "scalar quaternion matrices", scal, 1e-12),
        _check("permutation invariance", "simultaneous row/column permutation", pinv, 1e-12),
    ]


def suite_kernels() -> list[dict]:
    out = []
    for n in (16, 64):
        p = K.FiniteNParams(n)
        x = np.linspace(-n / 2, n / 2, 64)
        for beta in (1, 2, 4):
            c = K.cluster_TN_closed(beta, p, x)
            q = K.cluster_TN_quaternion(beta, p, x)
            f = K.cluster_TN_fourier(beta, p, x)
            out.append(_check(f"cluster routes beta={beta} n={n}", "quaternion product vs closed form",
                              float(np.max(np.abs(c - q))), 1e-9))
            out.append(_check(f"cluster Fourier sum beta={beta} n={n}", "finite Fourier double sum",
                              float(np.max(np.abs(c - f))), 1e-8))
            k, F = K.fourier_TN_lattice(beta, p, [0])
            out.append(_check(f"m_N(0) beta={beta} n={n}", "counting statistic is deterministic",
                              abs(K.rho1_at_zero(beta) - F[0]), 1e-8))
    z1, z2 = 0.8 - 0.4j, -1.1 + 0.9j
    err = max(abs(K.kgin_monomial(N, z1, z2) + K.kgin_tail(N, z1, z2) - np.exp(z1 * np.conj(z2)))
              / abs(np.exp(z1 * np.conj(z2))) for N in (1, 2, 5, 20))
    out.append(_check("K_N + K*_N = exp", "kernel split into monomial part and tail", err, 1e-10))
    p = K.FiniteNParams(16)
    xs = np.linspace(-7, 7, 31)
    r1 = max(abs(P.rho_n(K.KernelSpec.sine_finite(b, p), [x]) - 1) for b in (1, 2) for x in xs)
    out.append(_check("rho^1 = 1 finite sine beta in {1,2}", "kernel diagonal", r1, 1e-10))
    g = max(abs(P.rho_n(K.KernelSpec.ginibre(), [z]) - 1 / np.pi) for z in (0, 1 + 1j, -3 + 0.5j))
    out.append(_check("Ginibre rho^1 = 1/pi", "Ginibre kernel diagonal", g, 1e-12))
    return out


def bump(width: float = 2.0) -> Callable:
    def h(x):
        x = np.asarray(x, dtype=float)
        u = (x / width) ** 2
        return np.where(u < 1, np.exp(-1 / np.maximum(1 - u, 1e-300)), 0.0)
    return h


def suite_variance() -> list[dict]:
    out = []
    p = K.FiniteNParams(16)
    for beta in (2, 4):
        vf = P.var_linear_stat_fourier(p, beta, bump())
        vd = P.var_linear_stat_direct(p, beta, bump(), (-2, 2))
        out.append(_check(f"periodic variance Fourier vs direct beta={beta}", "periodic variance identity",
                          abs(vf - vd) / vd, 1e-6))
    ones = P.var_linear_stat_fourier(p, 2, lambda x: np.ones_like(x))
    out.append(_check("variance of total count", "total count deterministic", abs(ones), 1e-8))
    for N, r in ((2, 1.0), (4, 2.0)):
        rep = P.var_decomposition_check(N, P.h_r(r))
        out.append(_check(f"variance decomposition N={N} r={r}", "Var^N = Var^mu + M - Var^N*",
                          rep["relative_residual"], 1e-6))
    ratios = [P.var_rotation_statistic(int(2 * r * r), r) / r for r in (1, 2, 4)]
    out.append(_check("rotation statistic sup Var/r <= 2 Var/r at r=1", "Var = O(r)",
                      max(ratios) - 2 * ratios[0], 0.0))
    return out


def suite_assumptions(seed: int = 0) -> list[dict]:
    rng = np.random.default_rng(seed)
    pl = A.PlanarEmbedding()
    res = 0.0
    for _ in range(100):
        z = 4 * (rng.standard_normal(20) + 1j * rng.standard_normal(20))
        ell = int(rng.integers(1, 4))
        i = (int(rng.choice([-1, 1])),)
        for j in (1, 2):
            res = max(res, A.recursion_check(pl, z, ell, i, 6, j))
    out = [_check("recursion residual, 100 configurations", "Abel summation identity", res, 1e-12)]
    cos_err = 0.0
    for t in range(1000):
        d = 1 if t % 2 else 2
        x = rng.standard_normal(2 * d)
        y = rng.standard_normal(2 * d)
        if d == 2:
            x[[1, 3]] = y[[1, 3]] = 0
        ell = int(rng.integers(1, 6))
        ang = np.arccos(np.clip(x @ y / np.linalg.norm(x) / np.linalg.norm(y), -1, 1))
        s = sum(A.t_il(i, ell, x) * A.t_il(i, ell, y) for i in A.sign_vectors(d))
        cos_err = max(cos_err, abs(np.cos(ell * ang) - s))
    out.append(_check("cosine identity, 1000 pairs", "cos(l angle) via t_{i,l}", cos_err, 1e-12))
    margins = [A.taylor_log_bound_check(np.array([r, 0.0]), np.array([np.cos(a), np.sin(a)]), l0)
               for r in np.arange(1, 10) / 10 for a in (0, np.pi / 4, np.pi / 2, np.pi) for l0 in (2, 3)]
    out.append(_check("Taylor bound margin", "truncated log expansion", min(margins), -1e-12, "ge"))
    for N in range(1, 7):
        rep = A.varpi_bounds_report(N)
        out.append(_check(f"|varpi(N) - (N,0)| N={N}", "embedding deviation at the window edge",
                          rep["deviation_at_N"] - rep["deviation_bound"], 0.0))
        out.append(_check(f"identity region exact N={N}", "embedding equals (x,0) far out",
                          0.0 if rep["identity_exact"] else 1.0, 0.0))
        out.append(_check(f"ratio |x|/|varpi| inf N={N}", "ratio bounds", rep["ratio_inf"], 0.5, "ge"))
        out.append(_check(f"ratio |x|/|varpi| sup N={N}", "ratio bounds", rep["ratio_sup"], 2.0))
    return out


def suite_bounds() -> list[dict]:
    out = []
    margin = np.inf
    agree = 0.0
    for N in range(1, 9):
        for r in (0.5, 1.0, 2.0, 4.0):
            M = P.M_N_r(N, r)
            margin = min(margin, P.M_bound(N, r) - abs(M))
            agree = max(agree, abs(M - P.M_N_r_quadrature(N, r)))
    out.append(_check("M bound margin, N=1..8, r in {0.5,1,2,4}", "bound on the cross term M", margin, -1e-9, "ge"))
    out.append(_check("M closed form vs quadrature", "radial reduction of M", agree, 1e-8))
    return out


def run_suite(name: str, seed: int = 0) -> list[dict]:
    if name == "all":
        return [c for s in SUITES for c in run_suite(s, seed)]
    if name == "quaternion":
        return suite_quaternion(seed)
    if name == "kernels":
        return suite_kernels()
    if name == "variance":
        return suite_variance()
    if name == "assumptions":
        return suite_assumptions(seed)
    if name == "bounds":
        return suite_bounds()
    raise ValueError(f"unknown suite {name!r}")
