"""Variances of linear statistics: periodic fields on a torus and rotation statistics under Ginibre."""
import numpy as np

from loggas import kernels as K
from loggas import pointfield as P
from loggas import samplers as S
from loggas.verify import bump

# Periodic case. The Fourier formula and direct quadrature against the cluster function give the same number.
p = K.FiniteNParams(16)
h = bump(2.0)
for beta in (1, 2, 4):
    vf = P.var_linear_stat_fourier(p, beta, h)
    vd = P.var_linear_stat_direct(p, beta, h, (-2, 2))
    print(f"beta={beta}: Fourier {vf:.8f}   direct {vd:.8f}")

# Monte Carlo check at beta=2 with Haar unitaries.
vals = [np.sum(h(S.sample_circular_beta2(16, S.replica_rng(0, r)).points)) for r in range(4000)]
print(f"Monte Carlo variance over 4000 samples: {np.var(vals, ddof=1):.5f}")

# Planar case: the disk statistic h_r under the N-point Ginibre ensemble with N = 2r^2.
print("\n  r    Var/r")
for r in (1, 2, 4, 8):
    v = P.var_rotation_statistic(int(round(2 * r * r)), r)
    print(f"{r:3d}  {v / r:.5f}")

# The cross term M in the variance decomposition, its closed form against quadrature, and its bound.
print("\n N    r     M           quadrature   bound")
for N, r in ((1, 1.0), (3, 1.0), (3, 2.0), (8, 4.0)):
    print(f"{N:2d}  {r:3.1f}  {P.M_N_r(N, r):.6e}  {P.M_N_r_quadrature(N, r):.6e}  {P.M_bound(N, r):.6e}")

rep = P.var_decomposition_check(3, P.h_r(1.5))
print(f"\ndecomposition at N=3, r=1.5: relative residual {rep['relative_residual']:.1e}")
