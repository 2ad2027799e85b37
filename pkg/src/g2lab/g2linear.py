"""Pointwise G2 linear algebra on R^7.

The model 3-form, the metric-and-volume recovered from a positive
3-form, G2 membership and construction, the vector cross product, the
six contraction identities linking phi and psi, and the 2-form / 3-form
splittings with their projections.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .errors import BadTriple, NotPositive
from .exterior import AltTensor, Metric, hodge
from .octonion import C3


def eps7() -> np.ndarray:
    """Dense 7-index Levi-Civita symbol (cached)."""
    from .exterior import levi_civita_symbol
    return levi_civita_symbol(7)


PHI0 = AltTensor(7, 3, C3, _skip_antisym=True)


def psi0() -> AltTensor:
    return hodge(PHI0, Metric.euclidean(7), +1)


class G2MetricData:
    """Metric, volume form, orientation and 4-form associated to a 3-form."""

    __slots__ = ("phi", "g", "vol", "psi", "orientation")

    def __init__(self, phi: AltTensor, g: Metric, vol: AltTensor,
                 psi: AltTensor, orientation: int) -> None:
        self.phi = phi
        self.g = g
        self.vol = vol
        self.psi = psi
        self.orientation = orientation


def bilinear_7form(phi: np.ndarray) -> np.ndarray:
    """Coefficient matrix of (e_i . phi) ^ (e_j . phi) ^ phi on e^{1..7}."""
    e = eps7()
    t1 = np.einsum("iab,abcdefg->icdefg", phi, e)
    t2 = np.einsum("jcd,icdefg->ijefg", phi, t1)
    return np.einsum("efg,ijefg->ij", phi, t2) / 24.0


def metric_from_3form(phi: AltTensor | np.ndarray,
                      eig_floor: float = 1e-10) -> G2MetricData:
    """Recover the associated metric, volume form and 4-form of a
    positive 3-form."""
    if isinstance(phi, AltTensor):
        phi_arr = phi.comps
    else:
        phi_arr = np.asarray(phi, dtype=float)
        phi = AltTensor(7, 3, phi_arr, _skip_antisym=True)
    b = bilinear_7form(phi_arr)
    tr = np.trace(b)
    if tr == 0.0:
        raise NotPositive("bilinear form has zero trace")
    b_norm = b * np.sign(tr)
    eigvals = np.linalg.eigvalsh(b_norm)
    if eigvals[0] <= eig_floor * abs(eigvals[-1]):
        raise NotPositive(f"bilinear form not definite, eigs {eigvals[0]:.3e}"
                          f" .. {eigvals[-1]:.3e}")
    det_b = np.linalg.det(b)
    root9 = np.sign(det_b) * abs(det_b) ** (1.0 / 9.0)
    g = Metric(6.0 ** (-2.0 / 9.0) / root9 * b)
    vol_scalar = 6.0 ** (-7.0 / 9.0) * root9
    orientation = int(np.sign(vol_scalar))
    vol = AltTensor(7, 7, vol_scalar * eps7(), _skip_antisym=True)
    psi = hodge(phi, g, orientation)
    return G2MetricData(phi, g, vol, psi, orientation)


def pullback_3form(t: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """(T* phi)(u, v, w) = phi(Tu, Tv, Tw), on raw components."""
    return np.einsum("ijk,im,jn,kp->mnp", phi, t, t, t, optimize=True)


def is_g2_element(t: np.ndarray, tol: float = 1e-10) -> bool:
    """True iff T preserves the model 3-form; membership in G2."""
    t = np.asarray(t, dtype=float)
    ok = np.max(np.abs(pullback_3form(t, C3) - C3)) <= tol
    if ok:
        # preserving the 3-form implies preserving metric and volume
        loose = max(1e6 * tol, 1e-6)
        if np.max(np.abs(t.T @ t - np.eye(7))) > loose or \
                abs(np.linalg.det(t) - 1.0) > loose:
            raise RuntimeError("phi fixed but metric/volume not: table broken")
    return bool(ok)


def cross(x: np.ndarray, y: np.ndarray,
          phi: np.ndarray | None = None,
          g: Metric | None = None) -> np.ndarray:
    """Vector cross product, phi(X, Y, Z) = <X x Y, Z>."""
    phi_arr = C3 if phi is None else np.asarray(phi, dtype=float)
    w = np.einsum("ijk,i,j->k", phi_arr, x, y)
    return w if g is None else g.g_inv @ w


def random_admissible_triple(rng: np.random.Generator):
    """Orthonormal (h1, h2, h4) with phi0(h1, h2, h4) = 0, sampled
    uniformly from the S^6 x S^5 x S^3 construction."""
    h1 = rng.standard_normal(7)
    h1 /= np.linalg.norm(h1)
    h2 = rng.standard_normal(7)
    h2 -= (h2 @ h1) * h1
    h2 /= np.linalg.norm(h2)
    h3 = cross(h1, h2)
    h4 = rng.standard_normal(7)
    for u in (h1, h2, h3):
        h4 -= (h4 @ u) * u
    h4 /= np.linalg.norm(h4)
    return h1, h2, h4


def g2_from_triple(h1, h2, h4, tol: float = 1e-10) -> np.ndarray:
    """G2 element with columns (h1, h2, h1xh2, h4, h1xh4, h2xh4, h4x(h1xh2))."""
    h1, h2, h4 = (np.asarray(v, dtype=float) for v in (h1, h2, h4))
    gram = np.array([[h1 @ h1, h1 @ h2, h1 @ h4],
                     [h2 @ h1, h2 @ h2, h2 @ h4],
                     [h4 @ h1, h4 @ h2, h4 @ h4]])
    if np.max(np.abs(gram - np.eye(3))) > tol:
        raise BadTriple("triple is not orthonormal")
    h3 = cross(h1, h2)
    if abs(h3 @ h4) > tol:
        raise BadTriple("phi0(h1, h2, h4) must vanish")
    cols = [h1, h2, h3, h4, cross(h1, h4), cross(h2, h4), cross(h4, h3)]
    return np.stack(cols, axis=1)


# -- the six contraction identities ------------------------------------------

def contraction_identity_residuals(phi: AltTensor | np.ndarray,
                     data: G2MetricData | None = None) -> dict[str, float]:
    """Max-abs residual of each contraction identity, with the induced metric."""
    if data is None:
        data = metric_from_3form(phi)
    p = data.phi.comps
    q = data.psi.comps
    g = data.g.g
    gi = data.g.g_inv
    out = {}
    lhs = np.einsum("ijk,abc,ck->ijab", p, p, gi, optimize=True)
    rhs = np.einsum("ia,jb->ijab", g, g) - np.einsum("ib,ja->ijab", g, g) \
        + q
    out["phiphi_c"] = float(np.max(np.abs(lhs - rhs)))
    lhs = np.einsum("ijk,abc,bj,ck->ia", p, p, gi, gi, optimize=True)
    out["phiphi_bc"] = float(np.max(np.abs(lhs - 6.0 * g)))
    lhs = np.einsum("ijk,abcd,dk->ijabc", p, q, gi, optimize=True)
    rhs = (- np.einsum("ia,jbc->ijabc", g, p)
           - np.einsum("ib,ajc->ijabc", g, p)
           - np.einsum("ic,abj->ijabc", g, p)
           + np.einsum("aj,ibc->ijabc", g, p)
           + np.einsum("bj,aic->ijabc", g, p)
           + np.einsum("cj,abi->ijabc", g, p))
    out["phipsi_d"] = float(np.max(np.abs(lhs - rhs)))
    lhs = np.einsum("ijk,abcd,cj,dk->iab", p, q, gi, gi, optimize=True)
    out["phipsi_cd"] = float(np.max(np.abs(lhs - 4.0 * p)))
    lhs = np.einsum("ijkl,abcd,ck,dl->ijab", q, q, gi, gi, optimize=True)
    rhs = 4.0 * np.einsum("ia,jb->ijab", g, g) \
        - 4.0 * np.einsum("ib,ja->ijab", g, g) + 2.0 * q
    out["psipsi_cd"] = float(np.max(np.abs(lhs - rhs)))
    lhs = np.einsum("ijkl,abcd,bj,ck,dl->ia", q, q, gi, gi, gi, optimize=True)
    out["psipsi_bcd"] = float(np.max(np.abs(lhs - 24.0 * g)))
    return out


# -- 2-form splitting ---------------------------------------------------------

class FormSplit2:
    """Components of a 2-form in Omega^2_7 (+) Omega^2_14."""

    __slots__ = ("part7", "part14")

    def __init__(self, part7: AltTensor, part14: AltTensor) -> None:
        self.part7 = part7
        self.part14 = part14


def r_operator(beta: np.ndarray, data: G2MetricData) -> np.ndarray:
    """R(beta) = star(phi ^ beta) as the contraction
    (R(beta))_ab = +1/2 psi_abcd g^ci g^dj beta_ij.

    The sign makes R satisfy R^2 = 2 Id + R with eigenvalues {2, -1} and
    agrees with the direct wedge-and-star evaluation.
    """
    return 0.5 * np.einsum("abcd,ci,dj,ij->ab", data.psi.comps,
                           data.g.g_inv, data.g.g_inv, beta)


def split2(beta: AltTensor, data: G2MetricData) -> FormSplit2:
    """Split a 2-form using P7 = (R + 1)/3, P14 = (2 - R)/3."""
    b = beta.comps
    rb = r_operator(b, data)
    b7 = (rb + b) / 3.0
    b14 = (2.0 * b - rb) / 3.0
    return FormSplit2(AltTensor(7, 2, b7, _skip_antisym=True),
                      AltTensor(7, 2, b14, _skip_antisym=True))


def r_operator_matrix(data: G2MetricData) -> np.ndarray:
    """R as a 21x21 matrix on the sorted-pair basis of 2-forms."""
    pairs = list(combinations(range(7), 2))
    mat = np.zeros((21, 21))
    for col, (i, j) in enumerate(pairs):
        b = np.zeros((7, 7))
        b[i, j], b[j, i] = 1.0, -1.0
        rb = r_operator(b, data)
        mat[:, col] = [rb[a, c] for a, c in pairs]
    return mat


# -- 3-form splitting ---------------------------------------------------------

class FormSplit3:
    """A 3-form as f*phi + X . psi + traceless-symmetric part."""

    __slots__ = ("f", "x", "h0", "part1", "part7", "part27")

    def __init__(self, f, x, h0, part1, part7, part27) -> None:
        self.f = f
        self.x = x
        self.h0 = h0
        self.part1 = part1
        self.part7 = part7
        self.part27 = part27


def map_f(a: np.ndarray, data: G2MetricData) -> AltTensor:
    """Infinitesimal GL(7) action on phi: F(A) = d/dt|_0 exp(tA).phi,
    for a bilinear form A (first index lowered by g)."""
    a_mixed = data.g.g_inv @ np.asarray(a, dtype=float)   # A^l_m = g^{lk} A_km
    p = data.phi.comps
    comps = (np.einsum("lm,lnp->mnp", a_mixed, p)
             + np.einsum("ln,mlp->mnp", a_mixed, p)
             + np.einsum("lp,mnl->mnp", a_mixed, p))
    return AltTensor(7, 3, comps, _skip_antisym=True)


def _sym_basis():
    idx = [(i, j) for i in range(7) for j in range(i, 7)]
    mats = []
    for i, j in idx:
        m = np.zeros((7, 7))
        m[i, j] = m[j, i] = 1.0
        mats.append(m)
    return mats


_TRIPLES = list(combinations(range(7), 3))


def _vec35(comps: np.ndarray) -> np.ndarray:
    return np.array([comps[t] for t in _TRIPLES])


def split3(eta: AltTensor, data: G2MetricData) -> FormSplit3:
    """Recover (f, X, h0) with eta = f phi + X . psi + F(h0)."""
    cols = []
    sym = _sym_basis()
    for m in sym:
        cols.append(_vec35(map_f(m, data).comps))
    for l in range(7):
        cols.append(_vec35(np.einsum("l,lijk->ijk", np.eye(7)[l],
                                     data.psi.comps)))
    mat = np.stack(cols, axis=1)
    sol, *_ = np.linalg.lstsq(mat, _vec35(eta.comps), rcond=None)
    h = np.zeros((7, 7))
    for coef, m in zip(sol[:28], sym):
        h += coef * m
    x = sol[28:]
    trace = float(np.einsum("ij,ij->", h, data.g.g_inv))
    f = 3.0 / 7.0 * trace
    h0 = h - trace / 7.0 * data.g.g
    part1 = data.phi * f
    part7 = AltTensor(7, 3, np.einsum("l,lijk->ijk", x, data.psi.comps),
                      _skip_antisym=True)
    part27 = map_f(h0, data)
    return FormSplit3(f, x, h0, part1, part7, part27)


# -- random positive forms ----------------------------------------------------

def random_gl7(rng: np.random.Generator, cond_max: float = 10.0,
               det_positive: bool = True) -> np.ndarray:
    """Well-conditioned random GL(7) matrix."""
    q1, _ = np.linalg.qr(rng.standard_normal((7, 7)))
    q2, _ = np.linalg.qr(rng.standard_normal((7, 7)))
    smax = cond_max ** 0.5
    sv = np.exp(rng.uniform(np.log(1.0 / smax), np.log(smax), 7))
    a = q1 @ np.diag(sv) @ q2
    if det_positive and np.linalg.det(a) < 0:
        a[:, 0] = -a[:, 0]
    return a


def random_positive_3form(rng: np.random.Generator,
                          cond_max: float = 10.0) -> AltTensor:
    """A* phi0 for a well-conditioned A; positivity is automatic."""
    a = random_gl7(rng, cond_max=cond_max)
    return AltTensor(7, 3, pullback_3form(a, C3), _skip_antisym=True)


# -- wedge-and-star identity pack ---------------------------------------------

def wedge_star_identity_residuals(data: G2MetricData, alpha: np.ndarray,
                       x: np.ndarray) -> dict[str, float]:
    """Residuals of the phi/psi wedge-and-star identities for a 1-form
    alpha and vector field X."""
    from .exterior import flat, form_inner, interior, wedge

    g, orient = data.g, data.orientation
    phi, psi, vol = data.phi, data.psi, data.vol
    al = AltTensor(7, 1, alpha, _skip_antisym=True)
    xb = AltTensor(7, 1, flat(x, g), _skip_antisym=True)
    a2 = float(form_inner(al, al, g))
    x2 = float(x @ (g.g @ x))
    st = lambda w: hodge(w, g, orient)
    out = {}
    out["norm_phi"] = abs(form_inner(phi, phi, g) - 7.0)
    out["norm_psi"] = abs(form_inner(psi, psi, g) - 7.0)
    wa, pa = wedge(phi, al), wedge(psi, al)
    out["norm_phi_wedge_1form"] = abs(form_inner(wa, wa, g) - 4.0 * a2)
    out["norm_psi_wedge_1form"] = abs(form_inner(pa, pa, g) - 3.0 * a2)
    out["double_star_phi"] = (st(wedge(phi, st(wa))) + 4.0 * al).max_abs()
    out["double_star_psi"] = (st(wedge(psi, st(pa))) - 3.0 * al).max_abs()
    out["psi_wedge_star_phi"] = wedge(psi, st(wa)).max_abs()
    out["phi_wedge_star_psi"] = (wedge(phi, st(pa)) - 2.0 * pa).max_abs()
    out["star_phi_flat"] = (st(wedge(phi, xb)) - interior(x, psi)).max_abs()
    out["star_psi_flat"] = (st(wedge(psi, xb)) - interior(x, phi)).max_abs()
    ixphi = interior(x, phi)
    out["phi_wedge_interior_phi"] = (wedge(phi, ixphi) - 2.0 * st(ixphi)).max_abs()
    out["psi_wedge_interior_phi"] = (wedge(psi, ixphi) - 3.0 * st(xb)).max_abs()
    out["phi_wedge_interior_psi"] = (wedge(phi, interior(x, psi)) + 4.0 * st(xb)).max_abs()
    out["psi_wedge_interior_psi"] = wedge(psi, interior(x, psi)).max_abs()
    out["double_interior_wedge"] = (wedge(wedge(ixphi, ixphi), phi) - 6.0 * x2 * vol).max_abs()
    return out
