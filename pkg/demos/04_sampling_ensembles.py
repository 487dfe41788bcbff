"""Drawing configurations: Ginibre, circular beta=2 via Haar unitaries, MCMC for beta in {1, 4}, sine windows."""
import numpy as np

from loggas import samplers as S

# Every replica draws from its own stream keyed by (seed, replica), so replicas are reproducible in any order.
g = S.sample_ginibre(256, S.replica_rng(42, 0))
r = np.abs(g.points)
print(f"Ginibre N=256: max |z| = {r.max():.2f} (circular law edge near sqrt(N) = 16)")
print(f"  fraction with |z| < 8: {np.mean(r < 8):.3f} (area fraction 0.25)")

c = S.sample_circular_beta2(64, S.replica_rng(42, 1))
gaps = np.diff(np.sort(c.points))
print(f"\ncircular beta=2, n=64: mean gap {gaps.mean():.3f}, smallest gap {gaps.min():.3f}")

# Metropolis chains for the other symmetry classes. Step size is tuned during burn-in toward 30% acceptance.
for beta in (1, 4):
    conf, diag = S.sample_circular_mcmc(32, beta, S.replica_rng(42, 2 + beta), S.MCMCOptions(steps=600, burn_in=300))
    gaps = np.diff(np.sort(conf.points))
    print(f"circular beta={beta}, n=32: acceptance {diag.acceptance:.2f}, step {diag.step_size:.3f}, "
          f"smallest gap {gaps.min():.3f}")

# A sine-window sample keeps the points of a large circular sample that fall in (-N, N).
w = S.sample_sine_window(3, S.replica_rng(42, 9), torus_size=1024)
print(f"\nsine window N=3 on a torus of size 1024: {w.points.size} points in (-3, 3)")
print(np.round(w.points, 3))
