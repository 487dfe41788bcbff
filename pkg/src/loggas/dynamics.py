"""Euler-Maruyama simulation of the labelled log-gas SDEs.

Models
------
dyson-cutoff    dX^i = dB^i + (beta/2) sum_{|X^j| <= R, j != i} 1/(X^i - X^j) dt
dyson-periodic  dX^i = dB^i + (beta pi/(2n)) sum_{j != i} cot(pi (X^i - X^j)/n) dt
ginibre-a       dZ^i = dB^i - Z^i dt + sum_{|Z^j| <= R, j != i} (Z^i - Z^j)/|Z^i - Z^j|^2 dt
ginibre-b       dZ^i = dB^i + sum_{|Z^i - Z^j| <= R, j != i} (Z^i - Z^j)/|Z^i - Z^j|^2 dt
ginibre-finite  ginibre-a without cutoff

Complex noise has independent standard real and imaginary parts. The
periodic model keeps lifted (unwrapped) coordinates so crossings show up
as sign changes of consecutive label gaps.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CollisionDetected, SubstepCapExceeded
from .pointfield import Configuration, Domain
from .samplers import replica_rng

__all__ = [
    "SdeConfig", "Trajectory", "drift_dyson_cutoff", "drift_dyson_periodic", "drift_ginibre_A",
    "drift_ginibre_B", "drift_all", "step", "simulate", "simulate_ensemble", "min_gap",
    "drift_convergence_study", "cutoff_partial_sums", "nearest_gap_near_origin",
]

MODELS = ("dyson-cutoff", "dyson-periodic", "ginibre-a", "ginibre-b", "ginibre-finite")
_NOISE_CHUNK = 256


@dataclass(frozen=True)
class SdeConfig:
    model: str
    beta: float = 2.0
    R: Optional[float] = None
    n: Optional[int] = None
    dt: float = 1e-4
    T: float = 1.0
    seed: int = 0
    eps: float = 1e-6
    max_substeps: int = 1024
    record_every: int = 1
    noise: bool = True
    stationary_start: bool = False

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.dt <= 0 or self.eps <= 0 or self.T < 0:
            raise ValueError("need dt > 0, eps > 0, T >= 0")
        if self.model in ("dyson-cutoff", "ginibre-a", "ginibre-b") and not (self.R and self.R > 0):
            raise ValueError(f"{self.model} needs R > 0")
        if self.model == "dyson-periodic" and not (self.n and self.n > 0):
            raise ValueError("dyson-periodic needs torus size n > 0")
        if self.record_every < 1 or self.max_substeps < 1:
            raise ValueError("record_every and max_substeps must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))

    @property
    def is_complex(self) -> bool:
        return self.model.startswith("ginibre")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    config: SdeConfig
    min_gaps: np.ndarray
    substeps: np.ndarray
    stationary_start: bool = False
    aborted: bool = False

    def configurations(self) -> list[Configuration]:
        dom = Domain("torus", self.config.n) if self.config.model == "dyson-periodic" else Domain()
        pts = self.states
        if self.config.model == "dyson-periodic":
            n = self.config.n
            pts = np.mod(pts + n / 2, n) - n / 2
            pts = np.where(pts == -n / 2, n / 2, pts)
        return [Configuration(p, dom) for p in pts]

    def unlabelled(self) -> np.ndarray:
        """States with each frame sorted (by real part, then imaginary)."""
        if np.iscomplexobj(self.states):
            return np.sort_complex(self.states)
        return np.sort(self.states, axis=-1)


# single-particle drifts ---------------------------------------------------------------------


def _pts(state):
    return state.points if isinstance(state, Configuration) else np.asarray(state)


def drift_dyson_cutoff(state, i: int, R: float, beta: float) -> float:
    x = _pts(state).astype(float)
    mask = np.abs(x) <= R
    mask[i] = False
    d = x[i] - x[mask]
    if np.any(d == 0):
        raise CollisionDetected(f"particle {i} coincides with a neighbour")
    return float(beta / 2 * np.sum(1.0 / d))


def drift_dyson_periodic(state, i: int, beta: float, n: float) -> float:
    x = _pts(state).astype(float)
    d = x[i] - np.delete(x, i)
    s = np.sin(np.pi * d / n)
    if np.any(s == 0):
        raise CollisionDetected(f"particle {i} coincides with a neighbour")
    return float(beta * np.pi / (2 * n) * np.sum(np.cos(np.pi * d / n) / s))


def _coulomb(zi, zj):
    d = zi - zj
    a = np.abs(d) ** 2
    if np.any(a == 0):
        raise CollisionDetected("coincident points")
    return np.sum(d / a)


def drift_ginibre_A(state, i: int, R: Optional[float]) -> complex:
    """-z_i + sum over |z_j| <= R, j != i; ``R=None`` means no cutoff."""
    z = _pts(state).astype(complex)
    mask = np.ones(z.size, bool) if R is None else np.abs(z) <= R
    mask[i] = False
    return complex(-z[i] + _coulomb(z[i], z[mask]))


def drift_ginibre_B(state, i: int, R: float) -> complex:
    z = _pts(state).astype(complex)
    mask = np.abs(z - z[i]) <= R
    mask[i] = False
    return complex(_coulomb(z[i], z[mask])) if np.any(mask) else 0j


# vectorised drifts over replicas ------------------------------------------------------------


def drift_all(X: np.ndarray, cfg: SdeConfig) -> np.ndarray:
    """Drift for every particle of every replica; ``X`` has shape ``(R, n)``."""
    m = cfg.model
    if m == "dyson-periodic":
        a = np.pi * X / cfg.n
        c, s = np.cos(a), np.sin(a)
        # cot(a_i - a_j) = (c_i c_j + s_i s_j)/(s_i c_j - c_i s_j)
        num = c[:, :, None] * c[:, None, :] + s[:, :, None] * s[:, None, :]
        den = s[:, :, None] * c[:, None, :] - c[:, :, None] * s[:, None, :]
        idx = np.arange(X.shape[1])
        den[:, idx, idx] = 1.0
        num[:, idx, idx] = 0.0
        return cfg.beta * np.pi / (2 * cfg.n) * np.sum(num / den, axis=2)
    d = X[:, :, None] - X[:, None, :]
    idx = np.arange(X.shape[1])
    if m == "dyson-cutoff":
        w = (np.abs(X) <= cfg.R)[:, None, :].repeat(X.shape[1], 1)
    elif m == "ginibre-b":
        w = np.abs(d) <= cfg.R
    elif m == "ginibre-a":
        w = (np.abs(X) <= cfg.R)[:, None, :].repeat(X.shape[1], 1)
    else:
        w = np.ones(d.shape, bool)
    w[:, idx, idx] = False
    d = np.where(w, d, 1.0)
    if m == "dyson-cutoff":
        return cfg.beta / 2 * np.sum(np.where(w, 1.0 / d, 0.0), axis=2)
    inter = np.sum(np.where(w, d / np.abs(d) ** 2, 0.0), axis=2)
    return inter - X if m in ("ginibre-a", "ginibre-finite") else inter


def min_gap(X: np.ndarray, cfg: SdeConfig) -> np.ndarray:
    """Per-replica minimum separation; negative when 1D label order is broken."""
    if cfg.is_complex:
        if X.shape[1] < 2:
            return np.full(X.shape[0], np.inf)
        d = np.abs(X[:, :, None] - X[:, None, :])
        idx = np.arange(X.shape[1])
        d[:, idx, idx] = np.inf
        return d.min(axis=(1, 2))
    if X.shape[1] < 2:
        return np.full(X.shape[0], np.inf)
    g = np.diff(X, axis=1)
    if cfg.model == "dyson-periodic":
        g = np.concatenate([g, (X[:, :1] + cfg.n - X[:, -1:])], axis=1)
    return g.min(axis=1)


def _noise(rng: np.random.Generator, shape, complex_: bool) -> np.ndarray:
    if complex_:
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return rng.standard_normal(shape)


def _em(X, dW, cfg):
    return X + drift_all(X, cfg) * cfg.dt + dW


def _substep(x: np.ndarray, dW: np.ndarray, cfg: SdeConfig, rng: np.random.Generator):
    """Redo one step of one replica with 2, 4, ... substeps along a Brownian bridge of ``dW``."""
    m = 2
    while m <= cfg.max_substeps:
        h = cfg.dt / m
        xi = np.sqrt(h) * _noise(rng, (m,) + dW.shape, cfg.is_complex)
        xi -= (xi.sum(axis=0) - dW) / m
        sub = SdeConfig(**{**cfg.to_dict(), "dt": h})
        y = x[None, :].copy()
        ok = True
        for j in range(m):
            y = _em(y, xi[j][None, :], sub)
            if min_gap(y, cfg)[0] < cfg.eps:
                ok = False
                break
        if ok:
            return y[0], m
        m *= 2
    raise SubstepCapExceeded(f"gap < {cfg.eps} after {cfg.max_substeps} substeps", state=x)


def step(state, cfg: SdeConfig, rng: np.random.Generator):
    """One Euler-Maruyama step of a single configuration (array or Configuration)."""
    x = _pts(state).astype(complex if cfg.is_complex else float)
    dW = np.sqrt(cfg.dt) * _noise(rng, x.shape, cfg.is_complex) if cfg.noise else np.zeros_like(x)
    y = _em(x[None, :], dW[None, :], cfg)[0]
    if x.size > 1 and min_gap(y[None, :], cfg)[0] < cfg.eps:
        y, _ = _substep(x, dW, cfg, rng)
    return y


def simulate_ensemble(cfg: SdeConfig, initial: np.ndarray, replicas: Optional[Sequence[int]] = None,
                      keep_frames: bool = True) -> list[Trajectory]:
    """Integrate independent replicas in lockstep.

    ``initial`` has shape ``(R, n)``; replica ``r`` draws noise from
    ``replica_rng(cfg.seed, replicas[r])`` so results do not depend on how
    replicas are batched. With ``keep_frames=False`` only the first and last
    frames are stored.
    """
    X = np.array(initial, dtype=complex if cfg.is_complex else float)
    if X.ndim == 1:
        X = X[None, :]
    Rn, n = X.shape
    reps = list(range(Rn)) if replicas is None else list(replicas)
    rngs = [replica_rng(cfg.seed, r) for r in reps]
    if cfg.model != "dyson-periodic" and not cfg.is_complex:
        X = np.sort(X, axis=1)
    elif cfg.model == "dyson-periodic":
        X = np.sort(X, axis=1)
    steps = cfg.n_steps
    frames = [X.copy()]
    times = [0.0]
    gaps = np.empty((Rn, steps + 1))
    gaps[:, 0] = min_gap(X, cfg)
    subs = np.ones((Rn, steps), dtype=np.int64)
    aborted = np.zeros(Rn, bool)
    noise = None
    for k in range(steps):
        j = k % _NOISE_CHUNK
        if j == 0:
            m = min(_NOISE_CHUNK, steps - k)
            noise = np.stack([_noise(g, (m, n), cfg.is_complex) for g in rngs], axis=1) * np.sqrt(cfg.dt)
            if not cfg.noise:
                noise[:] = 0
        dW = noise[j]
        Y = _em(X, dW, cfg)
        g = min_gap(Y, cfg)
        bad = np.nonzero((g < cfg.eps) & ~aborted)[0]
        for r in bad:
            try:
                Y[r], subs[r, k] = _substep(X[r], dW[r], cfg, rngs[r])
            except SubstepCapExceeded:
                aborted[r] = True
                Y[r] = X[r]
        # aborted replicas stay frozen at their last good state
        Y[aborted] = X[aborted]
        if bad.size or aborted.any():
            g = min_gap(Y, cfg)
        X = Y
        gaps[:, k + 1] = g
        if keep_frames and (k + 1) % cfg.record_every == 0:
            frames.append(X.copy())
            times.append((k + 1) * cfg.dt)
    if not keep_frames and steps:
        frames.append(X.copy())
        times.append(steps * cfg.dt)
    states = np.stack(frames, axis=1)
    return [
        Trajectory(np.array(times), states[r], cfg, gaps[r], subs[r], cfg.stationary_start, bool(aborted[r]))
        for r in range(Rn)
    ]


def simulate(cfg: SdeConfig, initial) -> Trajectory:
    """Single trajectory; identical to replica 0 of :func:`simulate_ensemble`."""
    traj = simulate_ensemble(cfg, np.asarray(_pts(initial))[None, :])[0]
    if traj.aborted:
        raise SubstepCapExceeded("collision substepping cap reached", state=traj.states[-1])
    return traj


# conditional convergence of the cutoff drift ------------------------------------------------


def nearest_gap_near_origin(x: np.ndarray, n: Optional[float] = None) -> np.ndarray:
    """Nearest-neighbour distance of the particle closest to 0, per row.

    Depends only on the unlabelled configuration, so its law is preserved
    by any dynamics that preserve the configuration law.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if n is not None:
        x = np.mod(x + n / 2, n) - n / 2
    i = np.argmin(np.abs(x), axis=1)
    xi = x[np.arange(x.shape[0]), i][:, None]
    d = np.abs(x - xi)
    if n is not None:
        d = np.minimum(d, n - d)
    d[np.arange(x.shape[0]), i] = np.inf
    return d.min(axis=1)


def cutoff_partial_sums(x: np.ndarray, i: int, beta: float = 2.0):
    """Breakpoints and values of R -> S_R = (beta/2) sum_{|x_j| <= R, j != i} 1/(x_i - x_j).

    Returns ``(radii, values)``: S_R = values[k] for radii[k] <= R < radii[k+1],
    and S_R = 0 below radii[0].
    """
    x = np.asarray(x, dtype=float)
    others = np.delete(x, i)
    order = np.argsort(np.abs(others), kind="stable")
    radii = np.abs(others[order])
    terms = beta / 2 / (x[i] - others[order])
    vals = np.cumsum(terms)
    keep = np.append(radii[1:] != radii[:-1], True)
    return radii[keep], vals[keep]


def _sup_oscillation(radii, vals, R0: float, Rmax: float) -> float:
    """sup_{R, R' in [R0, Rmax]} |S_R - S_R'| for the step function S."""
    k0 = np.searchsorted(radii, R0, side="right") - 1
    start = vals[k0] if k0 >= 0 else 0.0
    inside = (radii > R0) & (radii <= Rmax)
    seq = np.concatenate([[start], vals[inside]])
    return float(seq.max() - seq.min())


def drift_convergence_study(samples: Sequence, R0_grid: Sequence[float] = (10, 20, 40), Rmax: float = 100.0,
                            beta: float = 2.0, tagged: str = "nearest_to_zero") -> dict:
    """Oscillation of the cutoff drift on a tagged particle as the cutoff grows.

    For each sample, tags the particle nearest 0 (or index ``tagged`` if an
    int) and computes sup_{R, R' in [R0, Rmax]} |S_R - S_R'| exactly from the
    breakpoints. Returns per-sample values and the median per R0.
    """
    R0_grid = list(R0_grid)
    table = np.empty((len(samples), len(R0_grid)))
    for s, conf in enumerate(samples):
        x = np.asarray(_pts(conf), dtype=float)
        i = int(np.argmin(np.abs(x))) if tagged == "nearest_to_zero" else int(tagged)
        radii, vals = cutoff_partial_sums(x, i, beta)
        for c, R0 in enumerate(R0_grid):
            table[s, c] = _sup_oscillation(radii, vals, R0, Rmax)
    return {"R0": R0_grid, "Rmax": Rmax, "per_sample": table, "median": np.median(table, axis=0)}
