"""Dense antisymmetric k-tensors over an n-dimensional fiber (n <= 8).

Forms are stored with all index permutations populated, so a 3-form
holds its full n^3 component array and the coefficient convention is
w = (1/k!) w_{i1..ik} dx^{i1} ^ ... ^ dx^{ik}.
"""

from __future__ import annotations

from itertools import combinations, permutations
from math import factorial

import numpy as np

from .errors import DegreeOverflow, DegreeUnderflow, SingularMetric


def _perm_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


_EPS_CACHE: dict[int, np.ndarray] = {}


def levi_civita_symbol(n: int) -> np.ndarray:
    """Dense n-index Levi-Civita symbol, cached for n <= 7."""
    if n > 7:
        raise ValueError("dense symbol only kept up to n = 7")
    eps = _EPS_CACHE.get(n)
    if eps is None:
        eps = np.zeros((n,) * n)
        for perm in permutations(range(n)):
            eps[perm] = _perm_sign(perm)
        eps.setflags(write=False)
        _EPS_CACHE[n] = eps
    return eps


def antisymmetrize(comps: np.ndarray) -> np.ndarray:
    """Full antisymmetrization (a projection), via independent components.

    Iterates sorted index tuples instead of summing k! transposed arrays,
    which keeps the cost at n!/(n-k)! regardless of degree.
    """
    k = comps.ndim
    n = comps.shape[0] if k else 0
    if k <= 1:
        return comps.copy()
    out = np.zeros_like(comps)
    fact = factorial(k)
    for idx in combinations(range(n), k):
        vals = [_perm_sign(perm) * comps[tuple(idx[p] for p in perm)]
                for perm in permutations(range(k))]
        # already-antisymmetric input: keep the value bitwise, so the
        # operation is exactly idempotent
        first = vals[0]
        if all(v == first for v in vals[1:]):
            val = first
        else:
            val = sum(vals) / fact
        if val == 0.0:
            continue
        for perm in permutations(range(k)):
            out[tuple(idx[p] for p in perm)] = _perm_sign(perm) * val
    return out


class AltTensor:
    """Fully antisymmetric k-tensor (k-form) on an n-dimensional fiber."""

    __slots__ = ("n", "k", "comps")

    def __init__(self, n: int, k: int, comps=None, _skip_antisym: bool = False):
        if not 0 <= k <= n:
            raise ValueError(f"degree {k} outside 0..{n}")
        self.n = n
        self.k = k
        if comps is None:
            comps = np.zeros((n,) * k)
        comps = np.asarray(comps, dtype=float)
        if comps.shape != (n,) * k:
            raise ValueError(f"expected shape {(n,) * k}, got {comps.shape}")
        self.comps = comps if _skip_antisym else antisymmetrize(comps)

    @classmethod
    def scalar(cls, n: int, value: float) -> "AltTensor":
        return cls(n, 0, np.asarray(float(value)), _skip_antisym=True)

    @classmethod
    def basis_form(cls, n: int, indices) -> "AltTensor":
        """dx^{i1} ^ ... ^ dx^{ik} for 0-based indices."""
        k = len(indices)
        comps = np.zeros((n,) * k)
        for perm in permutations(range(k)):
            comps[tuple(indices[p] for p in perm)] = _perm_sign(perm)
        return cls(n, k, comps, _skip_antisym=True)

    def __add__(self, other: "AltTensor") -> "AltTensor":
        self._check_match(other)
        return AltTensor(self.n, self.k, self.comps + other.comps,
                         _skip_antisym=True)

    def __sub__(self, other: "AltTensor") -> "AltTensor":
        self._check_match(other)
        return AltTensor(self.n, self.k, self.comps - other.comps,
                         _skip_antisym=True)

    def __mul__(self, scalar) -> "AltTensor":
        return AltTensor(self.n, self.k, self.comps * float(scalar),
                         _skip_antisym=True)

    __rmul__ = __mul__

    def __neg__(self) -> "AltTensor":
        return self * -1.0

    def _check_match(self, other: "AltTensor") -> None:
        if self.n != other.n or self.k != other.k:
            raise ValueError("mismatched fiber dimension or degree")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.comps))) if self.k else abs(float(self.comps))

    def allclose(self, other: "AltTensor", tol: float = 1e-12) -> bool:
        self._check_match(other)
        return bool(np.max(np.abs(self.comps - other.comps)) <= tol)

    def __repr__(self) -> str:
        return f"AltTensor(n={self.n}, k={self.k})"


class Metric:
    """Symmetric positive-definite bilinear form with cached inverse."""

    __slots__ = ("g", "g_inv", "sqrt_det")

    def __init__(self, g) -> None:
        g = np.asarray(g, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("metric must be a square matrix")
        if np.max(np.abs(g - g.T)) > 1e-12 * max(np.max(np.abs(g)), 1.0):
            raise SingularMetric("metric is not symmetric")
        eigvals = np.linalg.eigvalsh(g)
        if eigvals[0] <= 0:
            raise SingularMetric(f"metric not positive definite, min eig {eigvals[0]:.3e}")
        self.g = 0.5 * (g + g.T)
        self.g_inv = np.linalg.inv(self.g)
        self.sqrt_det = float(np.sqrt(np.linalg.det(self.g)))

    @classmethod
    def euclidean(cls, n: int) -> "Metric":
        return cls(np.eye(n))

    @property
    def n(self) -> int:
        return self.g.shape[0]


def wedge(a: AltTensor, b: AltTensor) -> AltTensor:
    """Wedge product in the (1/k!)-component convention."""
    if a.n != b.n:
        raise ValueError("mismatched fiber dimensions")
    p, q = a.k, b.k
    if p + q > a.n:
        raise DegreeOverflow(f"degree {p}+{q} exceeds fiber dimension {a.n}")
    if p == 0:
        return b * float(a.comps)
    if q == 0:
        return a * float(b.comps)
    prod = np.multiply.outer(a.comps, b.comps)
    coeff = factorial(p + q) / (factorial(p) * factorial(q))
    return AltTensor(a.n, p + q, coeff * antisymmetrize(prod),
                     _skip_antisym=True)


def interior(x: np.ndarray, a: AltTensor) -> AltTensor:
    """Interior product (X . a)(...) = a(X, ...)."""
    if a.k < 1:
        raise DegreeUnderflow("interior product needs degree >= 1")
    x = np.asarray(x, dtype=float)
    comps = np.tensordot(x, a.comps, axes=(0, 0))
    return AltTensor(a.n, a.k - 1, comps, _skip_antisym=True)


def form_inner(a: AltTensor, b: AltTensor, g: Metric) -> float:
    """Metric on k-forms, (1/k!) full contraction with the inverse metric."""
    a._check_match(b)
    if a.k == 0:
        return float(a.comps) * float(b.comps)
    raised = b.comps
    for axis in range(b.k):
        raised = np.tensordot(raised, g.g_inv, axes=(0, 0))
    # tensordot cycles axes, so after k contractions the order is restored
    return float(np.tensordot(a.comps, raised, axes=a.k) / factorial(a.k))


def flat(x: np.ndarray, g: Metric) -> np.ndarray:
    """Lower the index of a vector."""
    return g.g @ np.asarray(x, dtype=float)


def sharp(w: np.ndarray, g: Metric) -> np.ndarray:
    """Raise the index of a covector."""
    return g.g_inv @ np.asarray(w, dtype=float)


def volume_form(g: Metric, orientation: int = +1) -> AltTensor:
    """sqrt(det g) dx^1 ^ ... ^ dx^n, times the orientation sign."""
    n = g.n
    vol = AltTensor.basis_form(n, tuple(range(n)))
    return vol * (orientation * g.sqrt_det)


def hodge(a: AltTensor, g: Metric, orientation: int = +1) -> AltTensor:
    """Hodge star defined by <w, a> vol = w ^ (star a)."""
    n, k = a.n, a.k
    raised = a.comps
    for _ in range(k):
        raised = np.tensordot(raised, g.g_inv, axes=(0, 0))
    scale = orientation * g.sqrt_det
    if n <= 7:
        eps = levi_civita_symbol(n)
        if k == 0:
            out = scale * float(raised) * eps
        else:
            out = scale / factorial(k) * np.tensordot(raised, eps, axes=k)
        return AltTensor(n, n - k, out, _skip_antisym=True)
    out = np.zeros((n,) * (n - k))
    for idx_out in combinations(range(n), n - k):
        idx_in = tuple(i for i in range(n) if i not in idx_out)
        # sign of (idx_in, idx_out) as a permutation of (0 .. n-1)
        sign = _perm_sign(idx_in + idx_out)
        val = scale * sign * (raised[idx_in] if k else float(raised))
        if val == 0.0:
            continue
        for perm in permutations(range(n - k)):
            out[tuple(idx_out[p] for p in perm)] = _perm_sign(perm) * val
    return AltTensor(n, n - k, out, _skip_antisym=True)


def interior_star_residual(x: np.ndarray, a: AltTensor, g: Metric,
                        orientation: int = +1) -> float:
    """Max-abs residual of star(X . w) = (-1)^(k+1) (X-flat ^ star w)."""
    if a.k < 1:
        raise DegreeUnderflow("identity needs degree >= 1")
    lhs = hodge(interior(x, a), g, orientation)
    xb = AltTensor(a.n, 1, flat(x, g), _skip_antisym=True)
    rhs = wedge(xb, hodge(a, g, orientation)) * ((-1.0) ** (a.k + 1))
    return (lhs - rhs).max_abs()
