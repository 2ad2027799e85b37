"""Blade-based Clifford algebras Cl(p, q) for p + q <= 8, the enveloping
Clifford relation of octonion left translations, and the pointwise
spinor <-> octonion dictionary relative to a unit reference.
"""

from __future__ import annotations

import numpy as np

from .errors import NotImaginary, SignatureMismatch, ZeroReference
from .exterior import AltTensor
from .g2linear import G2MetricData, metric_from_3form
from .octonion import IMAG_EPS, Octonion, inverse, left_matrix, mul

_TABLE_CACHE: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


def _reorder_sign(a: int, b: int) -> int:
    """Sign from counting transpositions when merging two blades."""
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


def blade_product(mask_a: int, mask_b: int, p: int, q: int) -> tuple[int, int]:
    """(result mask, sign) for the product of two basis blades."""
    sign = _reorder_sign(mask_a, mask_b)
    common = mask_a & mask_b
    for bit in range(p, p + q):
        if common & (1 << bit):
            sign = -sign
    return mask_a ^ mask_b, sign


def _tables(p: int, q: int):
    """Dense product tables: result[i, j] and sign[i, j] over blade masks."""
    key = (p, q)
    hit = _TABLE_CACHE.get(key)
    if hit is None:
        dim = 1 << (p + q)
        res = np.empty((dim, dim), dtype=np.int64)
        sgn = np.empty((dim, dim), dtype=np.int64)
        for a in range(dim):
            for b in range(dim):
                res[a, b], sgn[a, b] = blade_product(a, b, p, q)
        hit = (res, sgn)
        _TABLE_CACHE[key] = hit
    return hit


class CliffordElement:
    """Element of Cl(p, q) as 2^(p+q) blade coefficients (bitmask index)."""

    __slots__ = ("p", "q", "coeffs")

    def __init__(self, p: int, q: int, coeffs=None) -> None:
        dim = 1 << (p + q)
        self.p = p
        self.q = q
        if coeffs is None:
            coeffs = np.zeros(dim)
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (dim,):
            raise ValueError(f"need {dim} blade coefficients")
        self.coeffs = coeffs.copy()

    @classmethod
    def scalar(cls, p: int, q: int, value: float = 1.0) -> "CliffordElement":
        out = cls(p, q)
        out.coeffs[0] = value
        return out

    @classmethod
    def vector(cls, p: int, q: int, comps) -> "CliffordElement":
        out = cls(p, q)
        for i, c in enumerate(comps):
            out.coeffs[1 << i] = c
        return out

    @classmethod
    def blade(cls, p: int, q: int, indices,
              value: float = 1.0) -> "CliffordElement":
        mask = 0
        for i in indices:
            mask |= 1 << i
        out = cls(p, q)
        out.coeffs[mask] = value
        return out

    def _check(self, other: "CliffordElement") -> None:
        if (self.p, self.q) != (other.p, other.q):
            raise SignatureMismatch(
                f"Cl({self.p},{self.q}) vs Cl({other.p},{other.q})")

    def __add__(self, other):
        self._check(other)
        return CliffordElement(self.p, self.q, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return CliffordElement(self.p, self.q, self.coeffs - other.coeffs)

    def __mul__(self, other):
        if isinstance(other, CliffordElement):
            return clifford_mul(self, other)
        return CliffordElement(self.p, self.q, self.coeffs * float(other))

    __rmul__ = lambda self, other: CliffordElement(self.p, self.q,
                                                   self.coeffs * float(other))

    def __neg__(self):
        return CliffordElement(self.p, self.q, -self.coeffs)

    def grade(self, k: int) -> "CliffordElement":
        out = CliffordElement(self.p, self.q)
        for mask in range(self.coeffs.size):
            if bin(mask).count("1") == k:
                out.coeffs[mask] = self.coeffs[mask]
        return out

    def grades(self) -> np.ndarray:
        return np.array([bin(m).count("1") for m in range(self.coeffs.size)])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def allclose(self, other, tol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= tol)

    def __repr__(self) -> str:
        return f"CliffordElement(p={self.p}, q={self.q})"


def clifford_mul(x: CliffordElement, y: CliffordElement) -> CliffordElement:
    x._check(y)
    res, sgn = _tables(x.p, x.q)
    out = CliffordElement(x.p, x.q)
    xi = np.nonzero(x.coeffs)[0]
    yi = np.nonzero(y.coeffs)[0]
    for a in xi:
        ca = x.coeffs[a]
        np.add.at(out.coeffs, res[a, yi], ca * sgn[a, yi] * y.coeffs[yi])
    return out


def reversion(x: CliffordElement) -> CliffordElement:
    k = x.grades()
    return CliffordElement(x.p, x.q,
                           x.coeffs * (-1.0) ** (k * (k - 1) // 2))


def grade_involution(x: CliffordElement) -> CliffordElement:
    return CliffordElement(x.p, x.q, x.coeffs * (-1.0) ** x.grades())


def clifford_conjugation(x: CliffordElement) -> CliffordElement:
    k = x.grades()
    return CliffordElement(x.p, x.q,
                           x.coeffs * (-1.0) ** (k * (k + 1) // 2))


def blade_norm(x: CliffordElement) -> float:
    """N(a) = |<reversion(a) a>_0|."""
    return abs(float(clifford_mul(reversion(x), x).coeffs[0]))


def vector_inner(p: int, q: int, u, v) -> float:
    """The quadratic form g(u, v) of the signature."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    signs = np.concatenate([np.ones(p), -np.ones(q)])
    return float(np.sum(signs * u * v))


def basis_mul_table(p: int, q: int) -> list[list[dict]]:
    """Full basis-blade multiplication table (for the table emitter)."""
    dim = 1 << (p + q)
    res, sgn = _tables(p, q)
    return [[{"mask": int(res[a, b]), "sign": int(sgn[a, b])}
             for b in range(dim)] for a in range(dim)]


# -- enveloping algebra of left translations ----------------------------------

ENVELOPING_KAPPA = 2.0
"""Constant in L_A L_B + L_B L_A = -kappa <A, B> Id for imaginary A, B.

Some printed accounts of the enveloping identity carry kappa = 1; the
matrix oracle and the polarized square-norm identity both give 2.
"""


def enveloping_residual(a: Octonion, b: Octonion,
                        eps: float = IMAG_EPS) -> float:
    """Max-abs residual of the Clifford relation for left translations."""
    if not a.is_imaginary(eps) or not b.is_imaginary(eps):
        raise NotImaginary("enveloping relation needs imaginary octonions")
    la, lb = left_matrix(a), left_matrix(b)
    anti = la @ lb + lb @ la
    return float(np.max(np.abs(anti + ENVELOPING_KAPPA * a.dot(b)
                               * np.eye(8))))


# -- pointwise spinor <-> octonion dictionary ----------------------------------

class SpinorPoint:
    """An 8-component spinor value at a point, identified with an
    octonion through a unit reference spinor."""

    __slots__ = ("comps",)

    def __init__(self, comps) -> None:
        comps = np.asarray(comps, dtype=float)
        if comps.shape != (8,):
            raise ValueError("spinor point needs 8 components")
        self.comps = comps.copy()


def clifford_action(v: Octonion, eta: SpinorPoint) -> SpinorPoint:
    """Action of an octonion (vector when imaginary) on a spinor via
    left translation; satisfies the Cl(0, 7) relation on vectors."""
    return SpinorPoint(left_matrix(v) @ eta.comps)


def j_map(eta: SpinorPoint, xi: SpinorPoint) -> Octonion:
    """j_xi(eta): the octonion A with eta = A . xi; equals eta xi^-1."""
    xi_oct = Octonion(xi.comps)
    if xi_oct.norm_sq() < 1e-24:
        raise ZeroReference("reference spinor must be nonzero")
    return mul(Octonion(eta.comps), inverse(xi_oct))


def j_inverse(a: Octonion, xi: SpinorPoint) -> SpinorPoint:
    xi_oct = Octonion(xi.comps)
    if xi_oct.norm_sq() < 1e-24:
        raise ZeroReference("reference spinor must be nonzero")
    return SpinorPoint(mul(a, xi_oct).coeffs)


def reference_structure(xi: SpinorPoint,
                        data0: G2MetricData | None = None) -> AltTensor:
    """The 3-form associated with a unit reference spinor,
    phi_xi = sigma_xi(phi0)."""
    from .deform import sigma
    from .g2linear import PHI0
    if data0 is None:
        data0 = metric_from_3form(PHI0)
    return sigma(Octonion(xi.comps), PHI0, data0)


def sigma_from_spinor(a: Octonion, base_phi: AltTensor,
                      data: G2MetricData | None = None) -> AltTensor:
    """The structure of the transported spinor A . zeta: sigma_A(phi_zeta)."""
    from .deform import sigma
    return sigma(a, base_phi, data)
