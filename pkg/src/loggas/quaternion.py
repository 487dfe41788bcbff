"""Complex-coefficient quaternions and the self-dual quaternion determinant.

A quaternion ``q = q0*1 + q1*e1 + q2*e2 + q3*e3`` is identified with the
2x2 complex matrix

    1  = [[1, 0], [0, 1]]        e1 = [[i, 0], [0, -i]]
    e2 = [[0, 1], [-1, 0]]       e3 = [[0, i], [i, 0]]

and its scalar part ``q0`` equals half the trace of that matrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooLarge, NotSelfDual

__all__ = [
    "Quaternion",
    "QuaternionMatrix",
    "from_complex_2x2",
    "to_complex_2x2",
    "conj_dual",
    "complexify",
    "qdet",
    "SELF_DUAL_ATOL",
    "QDET_MAX_DIM",
]

SELF_DUAL_ATOL = 1e-12
QDET_MAX_DIM = 9

_BASIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[1j, 0], [0, -1j]],
        [[0, 1], [-1, 0]],
        [[0, 1j], [1j, 0]],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class Quaternion:
    q0: complex = 0.0
    q1: complex = 0.0
    q2: complex = 0.0
    q3: complex = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = np.asarray(a, dtype=complex)
        return cls(complex(a[0]), complex(a[1]), complex(a[2]), complex(a[3]))

    def to_array(self) -> np.ndarray:
        return np.array([self.q0, self.q1, self.q2, self.q3], dtype=complex)

    @property
    def scalar(self) -> complex:
        return self.q0

    def __add__(self, other):
        if not isinstance(other, Quaternion):
            other = Quaternion(other)
        return Quaternion.from_array(self.to_array() + other.to_array())

    __radd__ = __add__

    def __neg__(self):
        return Quaternion.from_array(-self.to_array())

    def __sub__(self, other):
        return self + (-other if isinstance(other, Quaternion) else Quaternion(-other))

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return from_complex_2x2(to_complex_2x2(self) @ to_complex_2x2(other))
        return Quaternion.from_array(self.to_array() * other)

    def __rmul__(self, other):
        return Quaternion.from_array(self.to_array() * other)

    def conj_dual(self) -> "Quaternion":
        return conj_dual(self)

    def isclose(self, other: "Quaternion", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.to_array(), other.to_array(), rtol=0, atol=atol))


def from_complex_2x2(m) -> Quaternion:
    """Inverse of :func:`to_complex_2x2`."""
    m = np.asarray(m, dtype=complex)
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    return Quaternion(
        complex((a + d) / 2),
        complex(-1j * (a - d) / 2),
        complex((b - c) / 2),
        complex(-1j * (b + c) / 2),
    )


def to_complex_2x2(q: Quaternion) -> np.ndarray:
    return np.tensordot(q.to_array(), _BASIS, axes=1)


def conj_dual(q: Quaternion) -> Quaternion:
    return Quaternion(q.q0, -q.q1, -q.q2, -q.q3)


class QuaternionMatrix:
    """An n x n matrix of quaternions stored as an ``(n, n, 4)`` array.

    Parameters
    ----------
    entries : array_like or nested list of Quaternion
        Either coefficients of shape ``(n, n, 4)`` or an n x n nested list
        of :class:`Quaternion`.
    self_dual : bool
        Declares ``a_ij = conj_dual(a_ji)``; :func:`qdet` verifies it.
    """

    def __init__(self, entries, self_dual: bool = True):
        if isinstance(entries, (list, tuple)) and entries and isinstance(entries[0][0], Quaternion):
            arr = np.array([[q.to_array() for q in row] for row in entries])
        else:
            arr = np.asarray(entries, dtype=complex)
        if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != 4:
            raise ValueError(f"expected shape (n, n, 4), got {arr.shape}")
        self.coeffs = arr
        self.self_dual = self_dual

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    def __getitem__(self, ij) -> Quaternion:
        return Quaternion.from_array(self.coeffs[ij])

    @classmethod
    def from_scalar(cls, a) -> "QuaternionMatrix":
        a = np.asarray(a, dtype=complex)
        c = np.zeros(a.shape + (4,), dtype=complex)
        c[..., 0] = a
        return cls(c, self_dual=bool(np.allclose(a, a.T, rtol=0, atol=SELF_DUAL_ATOL)))

    def permuted(self, perm) -> "QuaternionMatrix":
        perm = np.asarray(perm)
        return QuaternionMatrix(self.coeffs[np.ix_(perm, perm)], self.self_dual)

    def blocks(self) -> np.ndarray:
        """Entries as 2x2 complex blocks, shape ``(n, n, 2, 2)``."""
        return np.einsum("ijk,kab->ijab", self.coeffs, _BASIS)

    def is_self_dual(self, atol: float = SELF_DUAL_ATOL) -> bool:
        c = self.coeffs
        dual_t = np.swapaxes(c, 0, 1) * np.array([1, -1, -1, -1])
        return bool(np.all(np.abs(c - dual_t) <= atol))


def complexify(A: QuaternionMatrix) -> np.ndarray:
    n = A.n
    return A.blocks().transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)


def qdet(A: QuaternionMatrix, max_dim: int = QDET_MAX_DIM, check_cycles: bool = False) -> complex:
    """Cycle-expansion determinant of a self-dual quaternion matrix.

    Sums ``sign(sigma) * prod_cycles scalar(a_{i1 i2} a_{i2 i3} ... a_{ik i1})``
    over permutations. The expansion is organised by peeling off the cycle
    through the smallest remaining index, memoised on the remaining subset.

    With ``check_cycles=True`` each cycle is also evaluated in reversed
    order and the scalar parts are compared; for self-dual input they agree.
    """
    if A.self_dual and not A.is_self_dual():
        raise NotSelfDual("a_ij != conj_dual(a_ji) beyond tolerance")
    n = A.n
    if n > max_dim:
        raise DimensionTooLarge(f"n={n} exceeds cap {max_dim}")
    if n == 0:
        return 1.0 + 0j
    blocks = A.blocks()
    memo: dict[int, complex] = {0: 1.0 + 0j}

    def f(mask: int) -> complex:
        if mask in memo:
            return memo[mask]
        s = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << s)
        total = 0j

        def extend(last: int, prod: np.ndarray, used: int, length: int, path: list[int]):
            nonlocal total
            closed = prod @ blocks[last, s]
            scal = 0.5 * (closed[0, 0] + closed[1, 1])
            if check_cycles:
                _check_reversed(blocks, path + [last] if last != s else path, scal)
            total += (-1) ** (length - 1) * scal * f(rest & ~used)
            free = rest & ~used
            while free:
                j = (free & -free).bit_length() - 1
                free &= free - 1
                extend(j, prod @ blocks[last, j], used | (1 << j), length + 1,
                       path + [last] if last != s else path)

        extend(s, np.eye(2, dtype=complex), 0, 1, [s])
        memo[mask] = total
        return total

    return complex(f((1 << n) - 1))


def _check_reversed(blocks: np.ndarray, cycle: list[int], scal: complex) -> None:
    rev = np.eye(2, dtype=complex)
    order = cycle[::-1]
    for a, b in zip(order, order[1:] + order[:1]):
        rev = rev @ blocks[a, b]
    rs = 0.5 * (rev[0, 0] + rev[1, 1])
    if abs(rs - scal) > 1e-9 * (1 + abs(scal)):
        raise AssertionError(f"cycle {cycle}: scalar parts {scal} vs reversed {rs}")
