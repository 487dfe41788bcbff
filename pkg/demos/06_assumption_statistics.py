"""Embedding of the sine window into the plane and the statistics built on it."""
import numpy as np

from loggas import assumptions as A
from loggas import samplers as S

# The embedding follows a circle of circumference n inside the window, bridges back to the real line,
# and is exactly the identity from N+1 on.
for N in (1, 2, 3):
    rep = A.varpi_bounds_report(N, n=None if N <= 2 else 1024)
    print(f"N={N}: deviation at x=N {rep['deviation_at_N']:.2e}, "
          f"|x|/|varpi| in [{rep['ratio_inf']:.3f}, {rep['ratio_sup']:.3f}], identity exact: {rep['identity_exact']}")

emb = A.EmbeddingVarpi(2)
xs = np.array([0.5, 1.5, 2.0, 2.5, 3.0, 4.0])
print("\nvarpi_2 at", xs)
print(np.round(emb(xs), 6))

# cos(l * angle) expands exactly in the per-sign-vector functions t_{i,l}.
x, y = np.array([0.3, -1.2]), np.array([2.0, 0.7])
ang = np.arccos(x @ y / np.linalg.norm(x) / np.linalg.norm(y))
for ell in (1, 2, 3):
    s = sum(A.t_il(i, ell, x) * A.t_il(i, ell, y) for i in A.sign_vectors(1))
    print(f"l={ell}: cos(l angle) = {np.cos(ell * ang):+.12f}, expansion = {s:+.12f}")

# The truncated log expansion bound is checked over a radius and angle grid.
margins = [A.taylor_log_bound_check(np.array([r, 0.0]), np.array([np.cos(a), np.sin(a)]), 3)
           for r in (0.1, 0.5, 0.9) for a in (0.0, 1.0, np.pi)]
print("\nTaylor bound margins:", np.round(margins, 5))

# Monte Carlo table: fraction of Ginibre samples whose Ubar statistic lies below each threshold,
# with Wilson 95% intervals. Ubar does not depend on r, so one radius suffices.
configs = [S.sample_ginibre(32, S.replica_rng(11, r)).points for r in range(60)]
rows = A.mc_assumption_tables(configs, "ginibre", 32, A.PlanarEmbedding(), A.PotentialPair("ginibre"),
                              "Ubar", k_grid=[1, 2, 4, 8], r_grid=[1])
for row in rows:
    print({k: (round(v, 3) if isinstance(v, float) else v) for k, v in row.items()})
