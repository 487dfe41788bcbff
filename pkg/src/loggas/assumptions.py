"""Finite-N statistics behind the quasi-Gibbs assumptions.

Configurations are mapped into the plane by an embedding: the circular
ensembles use :class:`EmbeddingVarpi`, which wraps the torus of size n onto
a circle through the origin near I_N = (-N, N) and is the identity far
away; Ginibre configurations use :class:`PlanarEmbedding`. Annuli are
S_rs = {b_r < |varpi| <= b_s} with b_r = r unless overridden.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy import integrate, stats

from .errors import RatioNotLessThanOne, ZeroVector
from .pointfield import Configuration

__all__ = [
    "EmbeddingVarpi", "PlanarEmbedding", "PotentialPair", "hamiltonian", "varpi_bounds_report",
    "angles", "t_il", "sign_vectors", "h_rs", "lipschitz_H", "u_stat", "ubar", "g_stat",
    "recursion_check", "v_rs", "v_rs_from_u", "vbar", "taylor_log_bound_check", "u_N_r_integral",
    "wilson_interval", "mc_assumption_tables", "TABLE_COLUMNS",
]

TABLE_COLUMNS = ("ensemble", "N", "r", "k", "stat", "estimate", "ci_lo", "ci_hi", "replicas")


def _pts(config):
    return config.points if isinstance(config, Configuration) else np.asarray(config)


class PlanarEmbedding:
    """z -> (Re z, Im z); real input maps to (x, 0)."""

    def __call__(self, x):
        x = np.asarray(x)
        return np.stack([np.real(x).astype(float), np.imag(x).astype(float)], axis=-1)


@dataclass(frozen=True)
class EmbeddingVarpi:
    """Embedding of the torus near I_N onto a circle, with a cubic Hermite bridge.

    On |x| < N: ((n/2pi) sin(2pi x/n), (n/2pi)(1 - cos(2pi x/n))).
    On |x| >= N+1: (x, 0), returned bit-exactly.
    On N <= |x| < N+1: cubic Hermite blend matching values and first
    derivatives at both ends (C^1).
    """

    N: int
    n: Optional[int] = None
    _coef: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.n if self.n is not None else 2 ** (4 * self.N)
        if self.N + 1 > n / 4:
            raise ValueError(f"torus size {n} too small for level {self.N}")
        object.__setattr__(self, "n", int(n))
        p0 = self._arc(np.float64(self.N))
        m0 = self._arc_prime(np.float64(self.N))
        p1 = np.array([self.N + 1.0, 0.0])
        m1 = np.array([1.0, 0.0])
        object.__setattr__(self, "_coef", np.stack([p0, m0, p1, m1]))

    def _arc(self, x):
        a = 2 * np.pi * np.asarray(x, dtype=float) / self.n
        return np.stack([self.n / (2 * np.pi) * np.sin(a), self.n / np.pi * np.sin(a / 2) ** 2], axis=-1)

    def _arc_prime(self, x):
        a = 2 * np.pi * np.asarray(x, dtype=float) / self.n
        return np.stack([np.cos(a), np.sin(a)], axis=-1)

    def _bridge(self, ax, deriv=False):
        t = (ax - self.N)[..., None]
        if deriv:
            h = [6 * t**2 - 6 * t, 3 * t**2 - 4 * t + 1, -6 * t**2 + 6 * t, 3 * t**2 - 2 * t]
        else:
            h = [2 * t**3 - 3 * t**2 + 1, t**3 - 2 * t**2 + t, -2 * t**3 + 3 * t**2, t**3 - t**2]
        c = self._coef
        return h[0] * c[0] + h[1] * c[1] + h[2] * c[2] + h[3] * c[3]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        out = np.stack([x, np.zeros_like(x)], axis=-1)
        arc = ax < self.N
        if np.any(arc):
            out[arc] = self._arc(x[arc])
        mid = (ax >= self.N) & (ax < self.N + 1)
        if np.any(mid):
            b = self._bridge(ax[mid])
            b[..., 0] *= np.sign(x[mid])
            out[mid] = b
        return out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        out = np.stack([np.ones_like(x), np.zeros_like(x)], axis=-1)
        arc = ax < self.N
        if np.any(arc):
            out[arc] = self._arc_prime(x[arc])
        mid = (ax >= self.N) & (ax < self.N + 1)
        if np.any(mid):
            b = self._bridge(ax[mid], deriv=True)
            b[..., 1] *= np.sign(x[mid])
            out[mid] = b
        return out

    def radius(self, x):
        return np.hypot(*np.moveaxis(self(x), -1, 0))

    def inverse_radius(self, rad: float) -> float:
        """Smallest x >= 0 with |varpi(x)| = rad (|varpi| is increasing on x >= 0)."""
        if rad <= 0:
            return 0.0
        if rad >= self.N + 1:
            return float(rad)
        from scipy.optimize import brentq
        return float(brentq(lambda t: float(self.radius(t)) - rad, 0.0, self.N + 1.0, xtol=1e-14))


def varpi_bounds_report(N: int, n: Optional[int] = None, grid_points: int = 10_000, c: float = 5.0) -> dict:
    """Value/derivative deviation at x=N, C^1 jumps at N and N+1, and |x|/|varpi(x)| range on a grid."""
    emb = EmbeddingVarpi(N, n)
    N_ = float(N)
    dev = float(np.hypot(*(emb(N_) - np.array([N_, 0.0]))))
    ddev = float(np.hypot(*(emb._arc_prime(N_) - np.array([1.0, 0.0]))))
    jumps = {}
    for xb in (N_, N_ + 1):
        lo, hi = np.nextafter(xb, -np.inf), xb
        jumps[xb] = (
            float(np.max(np.abs(emb(lo) - emb(hi)))),
            float(np.max(np.abs(emb.derivative(lo) - emb.derivative(hi)))),
        )
    L = 4.0 * (N + 1)
    x = np.linspace(-L, L, grid_points)
    x = x[x != 0]
    ratio = np.abs(x) / emb.radius(x)
    far = np.linspace(N + 1, 50 * (N + 1), 1000)
    return {
        "N": N, "n": emb.n,
        "deviation_at_N": dev, "deviation_bound": c * N**2 * 2.0 ** (-4 * N),
        "derivative_deviation_at_N": ddev, "derivative_bound": c * N * 2.0 ** (-4 * N),
        "value_jump": {k: v[0] for k, v in jumps.items()},
        "derivative_jump": {k: v[1] for k, v in jumps.items()},
        "ratio_inf": float(ratio.min()), "ratio_sup": float(ratio.max()),
        "identity_exact": bool(np.all(emb(far)[:, 0] == far) and np.all(emb(-far)[:, 0] == -far)
                               and np.all(emb(far)[:, 1] == 0)),
    }


# potentials and Hamiltonians ---------------------------------------------------------------


@dataclass(frozen=True)
class PotentialPair:
    """``variant`` is ``dyson``, ``ginibre`` or ``finite`` (log of embedded distance)."""

    variant: str
    beta: float = 2.0
    embedding: Optional[Callable] = None

    def Phi(self, x):
        x = np.asarray(x)
        if self.variant == "ginibre":
            return np.abs(x) ** 2
        return np.zeros(x.shape)

    def Psi(self, x, y):
        if self.variant == "finite":
            e = self.embedding
            d = e(x) - e(y)
            dist = np.hypot(d[..., 0], d[..., 1])
        else:
            dist = np.abs(np.subtract(x, y))
        beta = 2.0 if self.variant == "ginibre" else self.beta
        with np.errstate(divide="ignore"):
            return -beta * np.log(dist)


def hamiltonian(pp: PotentialPair, region: Optional[Callable], config) -> float:
    """sum_{x_i in A} Phi(x_i) + sum_{i<j in A} Psi(x_i, x_j); +inf on coincidence."""
    x = _pts(config)
    if region is not None:
        x = x[np.asarray(region(x), bool)]
    if x.size == 0:
        return 0.0
    i, j = np.triu_indices(x.size, 1)
    pair = pp.Psi(x[i], x[j])
    if np.any(np.isinf(pair)):
        return math.inf
    return float(np.sum(pp.Phi(x)) + np.sum(pair))


# angles and test functions -----------------------------------------------------------------


def sign_vectors(d: int) -> list[tuple[int, ...]]:
    out = [()]
    for _ in range(d):
        out = [v + (s,) for v in out for s in (1, -1)]
    return out


def angles(x) -> np.ndarray:
    """(theta_1, ..., theta_d) of x in R^{2d}; coordinates ordered (x_1..x_d, x_{d+1}..x_{2d}).

    theta_1 = atan2(x_{d+1}, x_1) in (-pi, pi]. For d = 2, theta_2 is the
    angle between x and span(e_1, e_3), signed by <(x_1, x_3), (x_2, x_4)>,
    in [-pi/2, pi/2].
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[-1] // 2
    if d not in (1, 2) or x.shape[-1] != 2 * d:
        raise ValueError("points must lie in R^2 or R^4")
    if np.any(np.all(x == 0, axis=-1)):
        raise ZeroVector("angle of the zero vector")
    th1 = np.arctan2(x[..., d], x[..., 0])
    if d == 1:
        return th1[..., None]
    a = np.hypot(x[..., 0], x[..., 2])
    b = np.hypot(x[..., 1], x[..., 3])
    s = np.where(x[..., 0] * x[..., 1] + x[..., 2] * x[..., 3] < 0, -1.0, 1.0)
    th2 = s * np.arctan2(b, a)
    return np.stack([th1, th2], axis=-1)


def t_il(i: Sequence[int], ell: int, x) -> np.ndarray:
    """prod_m t_{i_m}(ell theta_m(x)) with t_1 = cos and t_{-1} = sin."""
    th = angles(x)
    if th.shape[-1] != len(i):
        raise ValueError("sign vector length must equal d")
    out = np.ones(th.shape[:-1])
    for m, im in enumerate(i):
        out = out * (np.cos(ell * th[..., m]) if im == 1 else np.sin(ell * th[..., m]))
    return out


# annulus statistics --------------------------------------------------------------------------


def _b(b: Optional[Callable], r) -> float:
    return float(b(r)) if b is not None else float(r)


def _embedded(emb, config):
    y = _pts(config)
    Y = emb(y) if y.size else np.zeros((0, 2))
    return y, Y, np.hypot(Y[..., 0], Y[..., 1])


def h_rs(pp: PotentialPair, r: float, s: float, x, config, b: Optional[Callable] = None) -> float:
    """sum_{y_i in S_rs} Psi(x, y_i) - Psi(0, y_i)."""
    emb = pp.embedding or PlanarEmbedding()
    y, _, rad = _embedded(emb, config)
    sel = y[(rad > _b(b, r)) & (rad <= _b(b, s))]
    if sel.size == 0:
        return 0.0
    zero = np.zeros((), dtype=np.asarray(x).dtype)
    return float(np.sum(pp.Psi(x, sel) - pp.Psi(zero, sel)))


def _window_grid(emb, r: float, b, points: int, complex_: bool):
    R = _b(b, r)
    if complex_:
        m = int(np.sqrt(points)) + 1
        re, im = np.meshgrid(np.linspace(-R, R, m), np.linspace(-R, R, m))
        z = (re + 1j * im).ravel()
        return z[np.abs(z) <= R]
    L = emb.inverse_radius(R) if isinstance(emb, EmbeddingVarpi) else R
    g = np.linspace(-L, L, points)
    mid = 0.5 * (g[1:] + g[:-1])
    return np.sort(np.concatenate([g, mid]))


def lipschitz_H(pp: PotentialPair, r: float, s: float, config, grid=None, b: Optional[Callable] = None,
                points: int = 129) -> float:
    """Grid sup over x != x' in S_r of |h_rs(x) - h_rs(x')| / |x - x'|."""
    emb = pp.embedding or PlanarEmbedding()
    y = _pts(config)
    if grid is None:
        grid = _window_grid(emb, r, b, points, np.iscomplexobj(y) or pp.variant == "ginibre")
    grid = np.asarray(grid)
    _, _, rad = _embedded(emb, config)
    sel = y[(rad > _b(b, r)) & (rad <= _b(b, s))]
    if sel.size == 0:
        return 0.0
    zero = np.zeros((), dtype=grid.dtype)
    h = np.sum(pp.Psi(grid[:, None], sel[None, :]) - pp.Psi(zero, sel)[None, :], axis=1)
    dx = np.abs(np.subtract.outer(grid, grid))
    np.fill_diagonal(dx, np.inf)
    return float(np.max(np.abs(np.subtract.outer(h, h)) / dx))


def u_stat(emb, ell: int, i: Sequence[int], r: float, s: float, config, b: Optional[Callable] = None) -> float:
    """<y, t_{i,ell}(varpi) |varpi|^{-ell} 1_{S_rs}>."""
    _, Y, rad = _embedded(emb, config)
    m = (rad > _b(b, r)) & (rad <= _b(b, s))
    if not np.any(m):
        return 0.0
    return float(np.sum(t_il(i, ell, Y[m]) * rad[m] ** (-ell)))


def ubar(emb, ell0: int, config, b: Optional[Callable] = None) -> float:
    """<y, |varpi|^{-ell0} 1_{|varpi| > b_1}>."""
    _, _, rad = _embedded(emb, config)
    m = rad > _b(b, 1)
    return float(np.sum(rad[m] ** (-float(ell0))))


def g_stat(emb, ell: int, i: Sequence[int], r: int, j: int, config) -> float:
    """sum over 1 < |varpi(y)| <= r of ceil(|varpi|)^j |varpi|^{-ell} t_{i,ell}(varpi)."""
    _, Y, rad = _embedded(emb, config)
    m = (rad > 1) & (rad <= r)
    if not np.any(m):
        return 0.0
    return float(np.sum(np.ceil(rad[m]) ** j * rad[m] ** (-float(ell)) * t_il(i, ell, Y[m])))


def recursion_check(emb, config, ell: int, i: Sequence[int], r: int, j: int = 1) -> float:
    """|g^{j-1}_r - g^j_r / r - sum_{p=2}^{r-1} g^j_p / (p(p+1))|, scaled by max(1, |g^{j-1}_r|)."""
    lhs = g_stat(emb, ell, i, r, j - 1, config)
    rhs = g_stat(emb, ell, i, r, j, config) / r
    rhs += sum(g_stat(emb, ell, i, p, j, config) / (p * (p + 1)) for p in range(2, r))
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def _cos_angle(a, b):
    return np.sum(_unit(a) * _unit(b), axis=-1)


def _unit(v):
    # rescale first: squaring tiny components underflows
    v = v / np.max(np.abs(v), axis=-1, keepdims=True)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def v_rs(emb, ell: int, r: float, s: float, x, config, b: Optional[Callable] = None) -> float:
    """sum_{y in S_rs} |varpi(x)|^ell cos(ell angle(varpi x, varpi y)) / |varpi y|^ell; 0 if varpi(x) = 0."""
    X = emb(np.asarray(x))
    rx = float(np.hypot(X[0], X[1]))
    if rx == 0:
        return 0.0
    _, Y, rad = _embedded(emb, config)
    m = (rad > _b(b, r)) & (rad <= _b(b, s))
    if not np.any(m):
        return 0.0
    th = np.arccos(np.clip(_cos_angle(X[None, :], Y[m]), -1, 1))
    return float(np.sum(rx**ell * np.cos(ell * th) / rad[m] ** ell))


def v_rs_from_u(emb, ell: int, r: float, s: float, x, config, b: Optional[Callable] = None) -> float:
    """The same sum expanded through u_stat over sign vectors.

    Uses cos(l angle(x, y)) = sum_i t_{i,l}(x) t_{i,l}(y) with coefficient +1
    for every sign vector, from cos(a - b) = cos a cos b + sin a sin b.
    """
    X = emb(np.asarray(x))
    rx = float(np.hypot(X[0], X[1]))
    if rx == 0:
        return 0.0
    d = X.shape[-1] // 2
    return float(sum(rx**ell * t_il(i, ell, X) * u_stat(emb, ell, i, r, s, config, b)
                     for i in sign_vectors(d)))


def vbar(emb, ell0: int, r: float, config, pairs, b: Optional[Callable] = None) -> float:
    """Grid sup of sup_{y in S_{r,inf}} |v(x, y) - v(x', y)| / |x - x'|, v = |varpi x|^l0 / |1 - |varpi x|/|varpi y||^l0."""
    _, _, rad = _embedded(emb, config)
    ry = rad[rad > _b(b, r)]
    if ry.size == 0:
        return 0.0
    best = 0.0
    for x, xp in pairs:
        if x == xp:
            continue
        rx = np.hypot(*emb(np.asarray(x)))
        rxp = np.hypot(*emb(np.asarray(xp)))
        v = rx**ell0 / np.abs(1 - rx / ry) ** ell0
        vp = rxp**ell0 / np.abs(1 - rxp / ry) ** ell0
        best = max(best, float(np.max(np.abs(v - vp)) / abs(x - xp)))
    return best


def taylor_log_bound_check(x, y, ell0: int) -> float:
    """RHS - LHS of the truncated Taylor bound for log|x/|y| - y/|y||^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = np.linalg.norm(x) / np.linalg.norm(y)
    if not r < 1:
        raise RatioNotLessThanOne(f"|x|/|y| = {r}")
    ny = np.linalg.norm(y)
    lhs_log = np.log(np.sum((x / ny - y / ny) ** 2))
    if r == 0:
        return 0.0
    c = np.clip(_cos_angle(x, y), -1, 1)
    th = np.arccos(c)
    series = 2 * sum(r**l * np.cos(l * th) / l for l in range(1, ell0))
    lhs = abs(lhs_log + series)
    rhs = 2.0 / ell0 * r**ell0 / abs(1 - r) ** ell0
    return float(rhs - lhs)


def u_N_r_integral(emb: EmbeddingVarpi, r: int, i: Sequence[int] = (-1,)) -> float:
    """int over I_N of ceil(|varpi|)/|varpi| t_{i,1}(varpi) 1_{1 < |varpi| <= r} dx.

    With theta_1 = atan2, t_{(1),1}(varpi(x)) = sgn(x) cos(pi x/n) is odd on
    I_N, so i = (1) returns exactly 0. Otherwise integrates piecewise between
    the points where |varpi| crosses an integer.
    """
    if tuple(i) == (1,):
        return 0.0
    N = emb.N
    brk = [emb.inverse_radius(q) for q in range(1, r + 1)]
    total = 0.0
    for q in range(2, r + 1):
        a, bnd = brk[q - 2], min(brk[q - 1], float(N))
        if a >= bnd:
            continue
        f = lambda t: float(np.ceil(emb.radius(t)) / emb.radius(t) * t_il(i, 1, emb(t)))
        # |varpi| is even in x and the integrand is even for i = (-1)
        val, _ = integrate.quad(f, a, bnd, epsabs=1e-13, epsrel=1e-12, limit=200)
        total += 2 * val
    return total


# Monte Carlo tables ---------------------------------------------------------------------------


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = stats.binomtest(int(successes), int(trials)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


def _family_values(family: str, emb, pp, configs, r, s_grid, ell, i, ell0, b):
    vals = []
    for c in configs:
        if family == "H":
            v = max(lipschitz_H(pp, r, s, c, b=b) for s in s_grid)
        elif family == "U":
            v = max(abs(u_stat(emb, ell, i, r, s, c, b)) for s in s_grid)
        elif family == "Ubar":
            v = ubar(emb, ell0, c, b)
        else:
            raise ValueError(f"unknown statistic family {family!r}")
        vals.append(v)
    return np.asarray(vals)


def mc_assumption_tables(configs: Sequence, ensemble: str, N: int, emb, pp: PotentialPair,
                         family: str, k_grid: Iterable[float], r_grid: Iterable[float],
                         s_max: Optional[float] = None, ell: int = 1, i: Sequence[int] = (1,),
                         ell0: int = 3, b: Optional[Callable] = None) -> list[dict]:
    """Fraction of configurations in {stat <= k} with Wilson intervals.

    ``family`` is ``H`` (grid Lipschitz constant of h_rs, sup over s),
    ``U`` (sup over s of |u_stat|) or ``Ubar``. Each configuration's statistic
    is computed once and thresholded at every k, so rows are monotone in k.
    """
    k_grid = sorted(k_grid)
    rows = []
    R = len(configs)
    for r in r_grid:
        s_grid = list(range(int(r) + 1, int(s_max if s_max is not None else 4 * r) + 1))
        vals = _family_values(family, emb, pp, configs, r, s_grid, ell, i, ell0, b)
        stat = family if family != "U" else f"U[l={ell},i={tuple(i)}]"
        for k in k_grid:
            hits = int(np.sum(vals <= k))
            lo, hi = wilson_interval(hits, R)
            rows.append(dict(zip(TABLE_COLUMNS, (ensemble, N, r, k, stat, hits / R, lo, hi, R))))
    return rows
