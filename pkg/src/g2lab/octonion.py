"""Octonion arithmetic over the standard basis {1, e1, ..., e7}.

The imaginary-unit products are generated from the seven oriented cycles
(123), (145), (167), (246), (275), (374), (365): each cycle (ijk) sets
c_ijk = +1 and the full rank-3 tensor c is its total antisymmetrization.
Every sign-sensitive constant downstream (the rank-4 tensor, the model
3-form, the Fano table) is derived from this single list.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

import numpy as np

from .errors import NotImaginary, ZeroDivisor

ZERO_EPS = 1e-24   # squared-norm floor below which inversion is refused
IMAG_EPS = 1e-12   # relative real-part tolerance for "pure imaginary"

STRUCTURE_CYCLES = ((1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6),
                    (2, 7, 5), (3, 7, 4), (3, 6, 5))


def _perm_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def _build_c3() -> np.ndarray:
    c = np.zeros((7, 7, 7))
    for cycle in STRUCTURE_CYCLES:
        base = tuple(k - 1 for k in cycle)
        for perm in permutations(range(3)):
            idx = tuple(base[p] for p in perm)
            c[idx] = _perm_sign(perm)
    return c


C3 = _build_c3()
C3.setflags(write=False)


def _build_mul_tensor() -> np.ndarray:
    # m[k, i, j] is the e_k coefficient of e_i e_j
    m = np.zeros((8, 8, 8))
    m[0, 0, 0] = 1.0
    for i in range(1, 8):
        m[i, 0, i] = 1.0
        m[i, i, 0] = 1.0
        m[0, i, i] = -1.0
    m[1:, 1:, 1:] = C3
    return m


MUL_TENSOR = _build_mul_tensor()
MUL_TENSOR.setflags(write=False)


def basis_table() -> list[list[tuple[int, int]]]:
    """Exact 8x8 table: entry [i][j] = (k, sign) with e_i e_j = sign * e_k."""
    table = []
    for i in range(8):
        row = []
        for j in range(8):
            col = MUL_TENSOR[:, i, j]
            (k,) = np.nonzero(col)[0]
            row.append((int(k), int(col[k])))
        table.append(row)
    return table


def mul_exact(a, b):
    """Multiply octonions with Fraction coefficients using the exact table.

    Only the integer basis table enters, so results are exact rationals.
    """
    table = basis_table()
    out = [Fraction(0)] * 8
    for i in range(8):
        if a[i] == 0:
            continue
        for j in range(8):
            if b[j] == 0:
                continue
            k, sign = table[i][j]
            out[k] += Fraction(a[i]) * Fraction(b[j]) * sign
    return tuple(out)


def _build_c4() -> np.ndarray:
    # [e_j, e_k, e_l] = 2 c4_ijkl e_i, resolved by brute force over the table
    # rather than copied from any printed cycle list.
    c4 = np.zeros((7, 7, 7, 7))
    basis = np.eye(8)
    for j in range(1, 8):
        for k in range(1, 8):
            for l in range(1, 8):
                assoc = _assoc_raw(basis[j], basis[k], basis[l])
                # the associator of imaginary units is imaginary: row 0 drops
                c4[:, j - 1, k - 1, l - 1] = 0.5 * assoc[1:]
    return c4


def _mul_raw(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("kij,...i,...j->...k", MUL_TENSOR, a, b)


def _assoc_raw(a, b, c):
    return _mul_raw(_mul_raw(a, b), c) - _mul_raw(a, _mul_raw(b, c))


C4 = _build_c4()
C4.setflags(write=False)


class Octonion:
    """An element of the octonion algebra, held as 8 real coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs) -> None:
        arr = np.asarray(coeffs, dtype=float).copy()
        if arr.shape != (8,):
            raise ValueError(f"octonion needs 8 coefficients, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Octonion is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "Octonion":
        return cls(np.zeros(8))

    @classmethod
    def one(cls) -> "Octonion":
        e = np.zeros(8)
        e[0] = 1.0
        return cls(e)

    @classmethod
    def basis(cls, k: int) -> "Octonion":
        """e_0 = 1, e_1 .. e_7 the imaginary units."""
        e = np.zeros(8)
        e[k] = 1.0
        return cls(e)

    @classmethod
    def from_parts(cls, real: float, imag) -> "Octonion":
        e = np.zeros(8)
        e[0] = real
        e[1:] = np.asarray(imag, dtype=float)
        return cls(e)

    # -- structure ----------------------------------------------------------

    @property
    def real(self) -> float:
        return float(self.coeffs[0])

    @property
    def imag(self) -> np.ndarray:
        return self.coeffs[1:].copy()

    def norm_sq(self) -> float:
        return float(self.coeffs @ self.coeffs)

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def dot(self, other: "Octonion") -> float:
        return float(self.coeffs @ other.coeffs)

    def is_imaginary(self, eps: float = IMAG_EPS) -> bool:
        return abs(self.real) <= eps * max(self.norm(), 1e-300)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Octonion") -> "Octonion":
        return Octonion(self.coeffs + other.coeffs)

    def __sub__(self, other: "Octonion") -> "Octonion":
        return Octonion(self.coeffs - other.coeffs)

    def __neg__(self) -> "Octonion":
        return Octonion(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Octonion):
            return mul(self, other)
        return Octonion(self.coeffs * float(other))

    def __rmul__(self, other) -> "Octonion":
        return Octonion(self.coeffs * float(other))

    def __truediv__(self, other) -> "Octonion":
        if isinstance(other, Octonion):
            return mul(self, inverse(other))
        return Octonion(self.coeffs / float(other))

    def __repr__(self) -> str:
        return f"Octonion({np.array2string(self.coeffs, precision=6)})"

    def allclose(self, other: "Octonion", tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= tol)


def mul(a: Octonion, b: Octonion) -> Octonion:
    """Octonion product from the structure-constant tensor."""
    return Octonion(_mul_raw(a.coeffs, b.coeffs))


def conj(a: Octonion) -> Octonion:
    out = a.coeffs.copy()
    out[1:] *= -1.0
    return Octonion(out)


def inverse(a: Octonion, eps: float = ZERO_EPS) -> Octonion:
    n2 = a.norm_sq()
    if n2 < eps:
        raise ZeroDivisor(f"cannot invert octonion with |a|^2 = {n2:.3e}")
    return Octonion(conj(a).coeffs / n2)


def commutator(a: Octonion, b: Octonion) -> Octonion:
    return mul(a, b) - mul(b, a)


def associator(a: Octonion, b: Octonion, c: Octonion) -> Octonion:
    return Octonion(_assoc_raw(a.coeffs, b.coeffs, c.coeffs))


def exponential(a: Octonion, eps: float = IMAG_EPS) -> Octonion:
    """exp of a pure imaginary octonion: cos|a| + a sin|a|/|a|."""
    if not a.is_imaginary(eps):
        raise NotImaginary(f"exponential needs Re = 0, got Re = {a.real:.3e}")
    r = float(np.linalg.norm(a.coeffs[1:]))
    if r < 1e-6:
        # 4th-order Taylor polynomial of sin(r)/r around the removable zero
        s = 1.0 - r**2 / 6.0 + r**4 / 120.0
    else:
        s = np.sin(r) / r
    out = a.coeffs * s
    out[0] = np.cos(r)
    return Octonion(out)


def power(b: Octonion, k: int, eps: float = ZERO_EPS) -> Octonion:
    """Integer power, well defined because two elements generate an
    associative subalgebra."""
    n2 = b.norm_sq()
    if k < 0 and n2 < eps:
        raise ZeroDivisor("negative power of a (near) zero octonion")
    if k == 0:
        return Octonion.one()
    n = np.sqrt(n2)
    if n == 0.0:
        return Octonion.zero()
    beta = b.coeffs[1:]
    r = float(np.linalg.norm(beta))
    if r == 0.0:
        # real octonion: plain real power
        return Octonion.from_parts(float(b.real) ** k, np.zeros(7))
    theta = float(np.arctan2(r, b.real))
    scale = n**k
    out = np.zeros(8)
    out[0] = scale * np.cos(k * theta)
    out[1:] = scale * np.sin(k * theta) * beta / r
    return Octonion(out)


def left_matrix(b: Octonion) -> np.ndarray:
    """8x8 matrix of A -> bA acting on coefficient vectors."""
    return np.einsum("kij,i->kj", MUL_TENSOR, b.coeffs)


def right_matrix(b: Octonion) -> np.ndarray:
    """8x8 matrix of A -> Ab acting on coefficient vectors."""
    return np.einsum("kij,j->ki", MUL_TENSOR, b.coeffs)


class TranslationMatrix:
    """A left or right translation operator as an 8x8 matrix."""

    __slots__ = ("m", "side")

    def __init__(self, m: np.ndarray, side: str) -> None:
        if side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        self.m = np.asarray(m, dtype=float)
        self.side = side

    @classmethod
    def left(cls, b: Octonion) -> "TranslationMatrix":
        return cls(left_matrix(b), "left")

    @classmethod
    def right(cls, b: Octonion) -> "TranslationMatrix":
        return cls(right_matrix(b), "right")

    def __call__(self, a: Octonion) -> Octonion:
        return Octonion(self.m @ a.coeffs)


# -- batched helpers on (N, 8) coefficient arrays ---------------------------

def mul_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("kij,ni,nj->nk", MUL_TENSOR, a, b)


def conj_batch(a: np.ndarray) -> np.ndarray:
    out = a.copy()
    out[:, 1:] *= -1.0
    return out


def norm_batch(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.einsum("ni,ni->n", a, a))


def random_octonions(rng: np.random.Generator, n: int,
                     unit: bool = False, imaginary: bool = False) -> np.ndarray:
    """(n, 8) array of Gaussian octonions, optionally unit / pure imaginary."""
    out = rng.standard_normal((n, 8))
    if imaginary:
        out[:, 0] = 0.0
    if unit:
        out /= norm_batch(out)[:, None]
    return out
