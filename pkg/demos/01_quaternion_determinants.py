"""Quaternion determinants of self-dual matrices.

Run with ``python3 demos/01_quaternion_determinants.py``.
"""
import numpy as np

from loggas.quaternion import Quaternion, QuaternionMatrix, complexify, conj_dual, qdet
from loggas.verify import random_self_dual

# A quaternion is stored by its four complex coordinates; the 2x2 complex form is available too.
q = Quaternion(1.0, 0.5j, -0.25, 2j)
print("quaternion        ", q.to_array())
print("dual              ", conj_dual(q).to_array())

# Self-dual matrices: a_ji is the dual of a_ij. Draw one of size 4 from the kernel class
# (q0, q2 real and q1, q3 imaginary), where the cycle-expansion determinant is real.
rng = np.random.default_rng(1)
A = random_self_dual(4, rng, kind="kernel")
d = qdet(A)
print("qdet(A)           ", d)
print("qdet(A)^2         ", (d * d).real)
print("det(complexify(A))", np.linalg.det(complexify(A)).real)

# Relabelling the points permutes rows and columns together and leaves qdet unchanged.
perm = rng.permutation(4)
print("after permutation ", qdet(A.permuted(perm)))

# Scalar quaternion matrices reduce to ordinary determinants.
S = rng.standard_normal((3, 3))
S = S + S.T
print("scalar case       ", qdet(QuaternionMatrix.from_scalar(S)).real, np.linalg.det(S))
