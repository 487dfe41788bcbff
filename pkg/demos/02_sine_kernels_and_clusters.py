"""Sine kernels for beta = 1, 2, 4, their finite-torus versions, and the two-level cluster function."""
import numpy as np

from loggas import kernels as K

# Infinite-volume kernels: K(x) is a quaternion whose scalar part on the diagonal is the density.
for beta in (1, 2, 4):
    print(f"beta={beta}: rho^1 = {K.rho1_at_zero(beta)}, K(0.5) coefficients = {np.round(K.ksin_coeffs(beta, 0.5), 6)}")

# On a torus of even size n the kernels become finite trigonometric sums over half-integer frequencies.
p = K.FiniteNParams(32)
x = np.linspace(-3.75, 3.75, 11)
print("\nS_N(x) vs sin(pi x)/(pi x):")
for xi, sn, s in zip(x, K.sine_SN(p, x), K.sine_S(x)):
    print(f"  x={xi:+.1f}  S_N={sn:+.6f}  S={s:+.6f}")

# The cluster function has three independent routes that must agree.
grid = np.linspace(-16, 16, 65)
for beta in (1, 2, 4):
    c = K.cluster_TN_closed(beta, p, grid)
    q = K.cluster_TN_quaternion(beta, p, grid)
    f = K.cluster_TN_fourier(beta, p, grid)
    print(f"beta={beta}: |closed-quaternion| {np.abs(c - q).max():.1e}, |closed-fourier| {np.abs(c - f).max():.1e}")

# Its transform on the lattice k/n. At k=0 it matches rho^1, so the total particle count does not fluctuate.
for beta in (1, 2, 4):
    k, F = K.fourier_TN_lattice(beta, p, [0, 8, 16, 32])
    print(f"beta={beta}: F(T) at k/n for k={k.tolist()}: {np.round(F, 5)}")

# The Ginibre kernel splits into its first N modes plus a tail; the two add back up to exp(z conj(w)).
z, w = 0.7 + 0.2j, -0.4 + 1.1j
for N in (1, 4, 16):
    print(f"N={N:2d}: monomial + tail - exp = {abs(K.kgin_monomial(N, z, w) + K.kgin_tail(N, z, w) - np.exp(z * np.conj(w))):.1e}")
