"""Exact and Metropolis samplers for the finite-N ensembles.

Random streams are numpy PCG64 generators keyed by ``(seed, replica)``
through :func:`replica_rng`, so replicas can run in any order or in
parallel and still reproduce.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg

from .errors import ChainNotAdapted, EigensolverFailure
from .pointfield import Configuration, Domain

__all__ = [
    "MCMCOptions", "MCMCDiagnostics", "SamplerSpec", "replica_rng", "sample_ginibre",
    "sample_circular_beta2", "sample_circular_mcmc", "sample_sine_window", "sample_poisson_window",
    "default_torus_size", "wrap_torus", "draw",
]

DEFAULT_LARGE_TORUS = 1024


def replica_rng(seed: int, replica: int = 0) -> np.random.Generator:
    """Independent stream for ``(seed, replica)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(replica),))))


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else replica_rng(seed, 0)


def wrap_torus(x, n: float):
    """Map into (-n/2, n/2]."""
    y = np.mod(np.asarray(x, dtype=float) + n / 2, n) - n / 2
    return np.where(y == -n / 2, n / 2, y)


def sample_ginibre(N: int, seed, max_retries: int = 3) -> Configuration:
    """Eigenvalues of an N x N matrix with i.i.d. standard complex Gaussian entries (E|a|^2 = 1)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    rng = _rng(seed)
    A = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / np.sqrt(2)
    for attempt in range(max_retries + 1):
        try:
            ev = linalg.eigvals(A, check_finite=True)
            if np.all(np.isfinite(ev)):
                return Configuration(ev, Domain("plane"))
        except linalg.LinAlgError:
            pass
        A = A + 1e-14 * (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N)))
    raise EigensolverFailure(f"eigensolver failed after {max_retries} perturbed retries")


def _haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def sample_circular_beta2(n: int, seed) -> Configuration:
    """Eigenangles of a Haar unitary scaled to the torus (-n/2, n/2]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed)
    theta = np.angle(np.linalg.eigvals(_haar_unitary(n, rng)))
    x = wrap_torus(n * theta / (2 * np.pi), n)
    return Configuration(np.sort(x), Domain("torus", n))


@dataclass(frozen=True)
class MCMCOptions:
    steps: int = 400
    burn_in: int = 200
    step_size: float = 0.5
    adapt: bool = True
    target: float = 0.3

    def __post_init__(self):
        if self.steps < self.burn_in:
            raise ValueError("steps must be >= burn_in")


@dataclass
class MCMCDiagnostics:
    acceptance: float
    step_size: float
    burn_in_acceptance: float
    sweeps: int


def _pair_logdens(d: np.ndarray, n: int, beta: float) -> np.ndarray:
    return beta * np.log(np.abs(2 * np.sin(np.pi * d / n)))


def sample_circular_mcmc(n: int, beta: int, seed, mcmc: MCMCOptions = MCMCOptions(), chains: int = 1,
                         init: Optional[np.ndarray] = None):
    """Random-walk Metropolis for the circular beta-ensemble.

    One step is a sweep of single-site proposals over all particles; the
    log-density is sum_{i<j} beta log|e^{2 pi i x_i/n} - e^{2 pi i x_j/n}|.
    ``chains`` independent chains share one stream and are updated in
    lockstep. Step size adapts by Robbins-Monro during burn-in only.

    Returns ``(configs, diagnostics)`` where ``configs`` has shape
    ``(chains, n)`` (a single :class:`Configuration` when ``chains == 1``).
    """
    if beta not in (1, 2, 4):
        raise ValueError("beta must be 1, 2 or 4")
    rng = _rng(seed)
    if init is None:
        x = np.tile(-n / 2 + (np.arange(n) + 0.5), (chains, 1)) + rng.uniform(-0.25, 0.25, (chains, n))
    else:
        x = np.array(np.broadcast_to(init, (chains, n)), dtype=float)
    x = wrap_torus(x, n)
    step = float(mcmc.step_size)
    acc_burn = acc_post = 0
    for sweep in range(mcmc.steps):
        acc_sweep = 0
        for i in range(n):
            prop = wrap_torus(x[:, i] + step * rng.standard_normal(chains), n)
            others = np.delete(x, i, axis=1)
            if n > 1:
                old = _pair_logdens(others - x[:, i:i + 1], n, beta).sum(axis=1)
                new = _pair_logdens(others - prop[:, None], n, beta).sum(axis=1)
                logr = new - old
            else:
                logr = np.zeros(chains)
            accept = np.log(rng.uniform(size=chains)) < logr
            x[accept, i] = prop[accept]
            acc_sweep += int(accept.sum())
        rate = acc_sweep / (chains * n)
        if sweep < mcmc.burn_in:
            acc_burn += acc_sweep
            if mcmc.adapt:
                step = float(np.clip(step * np.exp((rate - mcmc.target) / np.sqrt(sweep + 1)), 1e-4, n / 2))
        else:
            acc_post += acc_sweep
    post = mcmc.steps - mcmc.burn_in
    acceptance = acc_post / (post * chains * n) if post else float("nan")
    diag = MCMCDiagnostics(acceptance, step, acc_burn / max(1, mcmc.burn_in * chains * n), mcmc.steps)
    # high acceptance is only a failure when the step could still have grown
    at_cap = step >= n / 2
    if post and (acceptance < 0.1 or (acceptance > 0.6 and not at_cap)):
        raise ChainNotAdapted(f"post-adaptation acceptance {acceptance:.3f} outside [0.1, 0.6]")
    x = np.sort(x, axis=1)
    if chains == 1:
        return Configuration(x[0], Domain("torus", n)), diag
    return x, diag


def default_torus_size(N: int, torus_size: Optional[int] = None) -> int:
    """2^{4N} for N <= 2, else ``torus_size`` or 1024; requires N + 1 <= n/4."""
    n = int(torus_size) if torus_size else (2 ** (4 * N) if N <= 2 else DEFAULT_LARGE_TORUS)
    if N + 1 > n / 4:
        raise ValueError(f"torus size {n} too small for window level N={N}")
    return n


def sample_sine_window(N: int, seed, torus_size: Optional[int] = None, beta: int = 2,
                       mcmc: MCMCOptions = MCMCOptions()) -> Configuration:
    """Circular sample on a torus of size n restricted to I_N = (-N, N)."""
    n = default_torus_size(N, torus_size)
    if beta == 2:
        full = sample_circular_beta2(n, seed).points
    else:
        full = sample_circular_mcmc(n, beta, seed, mcmc)[0].points
    inside = full[(full > -N) & (full < N)]
    return Configuration(inside, Domain("window", N))


def sample_poisson_window(L: float, intensity: float, seed) -> Configuration:
    """Poisson points of the given intensity on [-L, L]."""
    rng = _rng(seed)
    k = rng.poisson(2 * L * intensity)
    return Configuration(np.sort(rng.uniform(-L, L, k)), Domain("window", L))


@dataclass(frozen=True)
class SamplerSpec:
    """``kind`` is ``ginibre``, ``circular``, ``circular-mcmc`` or ``sine-window``."""

    kind: str
    n: int
    beta: int = 2
    seed: int = 0
    torus_size: Optional[int] = None
    mcmc: MCMCOptions = field(default_factory=MCMCOptions)

    def __post_init__(self):
        if self.kind not in ("ginibre", "circular", "circular-mcmc", "sine-window"):
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        if self.kind == "circular" and self.beta != 2:
            raise ValueError("Haar-unitary circular sampling requires beta=2; use circular-mcmc")


def draw(spec: SamplerSpec, replica: int) -> Configuration:
    """One sample for replica ``replica`` of ``spec``."""
    rng = replica_rng(spec.seed, replica)
    if spec.kind == "ginibre":
        return sample_ginibre(spec.n, rng)
    if spec.kind == "circular":
        return sample_circular_beta2(spec.n, rng)
    if spec.kind == "circular-mcmc":
        return sample_circular_mcmc(spec.n, spec.beta, rng, spec.mcmc)[0]
    return sample_sine_window(spec.n, rng, spec.torus_size, spec.beta, spec.mcmc)
