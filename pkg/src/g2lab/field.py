"""G2-structures as fields on a coordinate chart.

Pointwise metric from the 3-form, finite-difference Levi-Civita and
covariant derivative of phi, the full torsion 2-tensor with its
four-part splitting, the octonion covariant derivative, and the torsion
transformation law under the isometric deformations.

All manifold derivatives are second-order central differences.
"""

from __future__ import annotations

import json

import numpy as np

from .deform import bundle_inverse, bundle_mul, sigma
from .errors import BadConfig, LeftDomain, NormDrift
from .exterior import AltTensor, antisymmetrize
from .g2linear import (G2MetricData, PHI0, metric_from_3form, pullback_3form,
                       split2)
from .octonion import Octonion, exponential

_EYE7 = np.eye(7)


class PhiField:
    """A positive 3-form field over an axis-aligned box, with cached
    pointwise metric data."""

    def __init__(self, phi_at, domain, name: str = "field") -> None:
        self._phi_at = phi_at
        self.domain = np.asarray(domain, dtype=float)
        self.name = name
        self._cache: dict[bytes, G2MetricData] = {}

    def check_inside(self, x: np.ndarray) -> None:
        if np.any(x < self.domain[:, 0]) or np.any(x > self.domain[:, 1]):
            raise LeftDomain(f"point {x} left the domain of {self.name}")

    def phi(self, x: np.ndarray) -> np.ndarray:
        return self._phi_at(np.asarray(x, dtype=float))

    def data(self, x: np.ndarray) -> G2MetricData:
        x = np.asarray(x, dtype=float)
        key = x.tobytes()
        hit = self._cache.get(key)
        if hit is None:
            if len(self._cache) > 4096:
                self._cache.clear()
            hit = metric_from_3form(self.phi(x))
            self._cache[key] = hit
        return hit

    def metric(self, x: np.ndarray) -> np.ndarray:
        return self.data(x).g.g

    def psi(self, x: np.ndarray) -> np.ndarray:
        return self.data(x).psi.comps


def levi_civita_at(field: PhiField, x: np.ndarray,
                   fd_step: float = 1e-3) -> np.ndarray:
    """Christoffel symbols of the induced metric by central differences."""
    x = np.asarray(x, dtype=float)
    dg = np.empty((7, 7, 7))
    for m in range(7):
        dx = np.zeros(7)
        dx[m] = fd_step
        field.check_inside(x + dx)
        field.check_inside(x - dx)
        dg[m] = (field.metric(x + dx) - field.metric(x - dx)) / (2 * fd_step)
    gi = field.data(x).g.g_inv
    comb = dg + np.transpose(dg, (1, 0, 2)) - np.transpose(dg, (1, 2, 0))
    return 0.5 * np.einsum("kl,ijl->kij", gi, comb)


def nabla_phi(field: PhiField, x: np.ndarray,
              fd_step: float = 1e-3) -> np.ndarray:
    """Covariant derivative of the 3-form field, nabla_m phi_ijk."""
    x = np.asarray(x, dtype=float)
    dphi = np.empty((7, 7, 7, 7))
    for m in range(7):
        dx = np.zeros(7)
        dx[m] = fd_step
        dphi[m] = (field.phi(x + dx) - field.phi(x - dx)) / (2 * fd_step)
    gam = levi_civita_at(field, x, fd_step)
    p = field.phi(x)
    return (dphi
            - np.einsum("lmi,ljk->mijk", gam, p)
            - np.einsum("lmj,ilk->mijk", gam, p)
            - np.einsum("lmk,ijl->mijk", gam, p))


class G2Torsion:
    """Full torsion 2-tensor of a G2-structure field with its four-part
    splitting and the residual of the defining relation."""

    __slots__ = ("T", "t1", "t0", "t7", "t14", "defining_residual")

    def __init__(self, t, t1, t0, t7, t14, defining_residual) -> None:
        self.T = t
        self.t1 = t1
        self.t0 = t0
        self.t7 = t7
        self.t14 = t14
        self.defining_residual = defining_residual


def g2_torsion(field: PhiField, x: np.ndarray,
               fd_step: float = 1e-3) -> G2Torsion:
    """T_mn = (1/48) nabla_m phi_ijk psi_n^ijk, with the residual of
    nabla_m phi = 2 T_m^q psi_q... reported alongside."""
    data = field.data(x)
    nphi = nabla_phi(field, x, fd_step)
    gi = data.g.g_inv
    psi_raised = np.einsum("nabc,ia,jb,kc->nijk", data.psi.comps, gi, gi, gi, optimize=True)
    t = np.einsum("mijk,nijk->mn", nphi, psi_raised) / 48.0
    recon = 2.0 * np.einsum("mp,pq,qijk->mijk", t, gi, data.psi.comps, optimize=True)
    residual = float(np.max(np.abs(nphi - recon)))
    g = data.g.g
    trace = float(np.einsum("mn,mn->", t, gi))
    t1 = trace / 7.0 * g
    sym = 0.5 * (t + t.T) - t1
    anti = 0.5 * (t - t.T)
    parts = split2(AltTensor(7, 2, anti, _skip_antisym=True), data)
    return G2Torsion(t, t1, sym, parts.part7.comps, parts.part14.comps,
                     residual)


def torsion_octonion(t: np.ndarray, direction: np.ndarray,
                     data: G2MetricData) -> np.ndarray:
    """T(X) as a pure imaginary octonion, T(X)^q = X^m T_mp g^pq."""
    vec = np.einsum("m,mp,pq->q", direction, t, data.g.g_inv)
    out = np.zeros(8)
    out[1:] = vec
    return out


def covariant_octonion(field: PhiField, a_field, x: np.ndarray,
                       direction: np.ndarray,
                       fd_step: float = 1e-3) -> np.ndarray:
    """Levi-Civita covariant derivative of an octonion field along a
    coordinate direction vector."""
    x = np.asarray(x, dtype=float)
    direction = np.asarray(direction, dtype=float)
    da = np.zeros(8)
    for m in range(7):
        if direction[m] == 0.0:
            continue
        dx = np.zeros(7)
        dx[m] = fd_step
        da += direction[m] * (np.asarray(a_field(x + dx))
                              - np.asarray(a_field(x - dx))) / (2 * fd_step)
    gam = levi_civita_at(field, x, fd_step)
    out = da.copy()
    out[1:] += np.einsum("imk,m,k->i", gam, direction,
                         np.asarray(a_field(x))[1:])
    return out


def octonion_covariant_derivative(field: PhiField, x: np.ndarray,
                                  direction: np.ndarray, a_field,
                                  fd_step: float = 1e-3,
                                  torsion: G2Torsion | None = None) -> Octonion:
    """D_X A = nabla_X A - A T(X)."""
    if torsion is None:
        torsion = g2_torsion(field, x, fd_step)
    data = field.data(x)
    na = covariant_octonion(field, a_field, x, direction, fd_step)
    tx = torsion_octonion(torsion.T, direction, data)
    return Octonion(na - bundle_mul(np.asarray(a_field(x)), tx, data))


def leibniz_defect(field: PhiField, x: np.ndarray, a: Octonion, b: Octonion,
                   direction: np.ndarray,
                   fd_step: float = 1e-3) -> tuple[Octonion, Octonion]:
    """Measured defect nabla_X(AB) - (nabla_X A)B - A(nabla_X B) for
    constant-coefficient octonions, and its prediction [T(X), A, B].

    The associator orientation of this structure-constant table makes
    the defect equal +[T(X), A, B]; the same identity with the 4-form's
    orientation reads -2 psi(T(X), ., ., .)-sharp."""
    x = np.asarray(x, dtype=float)

    def prod_field(y):
        return bundle_mul(a.coeffs, b.coeffs, field.data(y))

    nab_prod = covariant_octonion(field, prod_field, x, direction, fd_step)
    # constant coefficients: nabla_X A has only the Gamma correction
    na = covariant_octonion(field, lambda y: a.coeffs, x, direction, fd_step)
    nb = covariant_octonion(field, lambda y: b.coeffs, x, direction, fd_step)
    data = field.data(x)
    defect = (nab_prod - bundle_mul(na, b.coeffs, data)
              - bundle_mul(a.coeffs, nb, data))
    t = g2_torsion(field, x, fd_step)
    tx = torsion_octonion(t.T, direction, data)
    pred = (bundle_mul(bundle_mul(tx, a.coeffs, data), b.coeffs, data)
            - bundle_mul(tx, bundle_mul(a.coeffs, b.coeffs, data), data))
    return Octonion(defect), Octonion(pred)


def sigma_deformed_field(field: PhiField, v_field,
                         name: str | None = None) -> PhiField:
    """The field x -> sigma_{V(x)}(phi(x))."""

    def phi_at(x):
        data = field.data(x)
        return sigma(Octonion(np.asarray(v_field(x))), data.phi, data).comps

    return PhiField(phi_at, field.domain, name or f"sigma({field.name})")


def torsion_transformation_residuals(field: PhiField, v_field, x: np.ndarray,
                      fd_step: float = 1e-3,
                      norm_tol: float = 1e-10) -> dict[str, float]:
    """Compare the torsion of the sigma_V-deformed field against the
    transformation law.

    For unit-norm V the constant-norm form T_V = -(DV) V^-1 is checked;
    the general form Im(Ad_V T + V (nabla V^-1)) is reported as well.
    """
    x = np.asarray(x, dtype=float)
    data = field.data(x)
    vx = np.asarray(v_field(x))
    n2 = float(vx[0] ** 2 + vx[1:] @ (data.g.g @ vx[1:]))
    if abs(n2 - 1.0) > norm_tol:
        raise NormDrift(f"|V|^2 = {n2} drifts from 1 beyond {norm_tol}")
    base_t = g2_torsion(field, x, fd_step)
    deformed = sigma_deformed_field(field, v_field)
    t_v = g2_torsion(deformed, x, fd_step)

    out_const = 0.0
    out_general = 0.0
    real_part = 0.0
    for m in range(7):
        dvm = octonion_covariant_derivative(
            field, x, _EYE7[m], v_field, fd_step, torsion=base_t).coeffs
        rhs_const = -bundle_mul(dvm, bundle_inverse(vx, data), data)
        lhs = torsion_octonion(t_v.T, _EYE7[m], data)
        out_const = max(out_const, float(np.max(np.abs(lhs[1:]
                                                       - rhs_const[1:]))))
        real_part = max(real_part, abs(rhs_const[0]))
        # general law: Ad_V T(X) + V nabla_X(V^-1)
        tb = torsion_octonion(base_t.T, _EYE7[m], data)
        ad_t = bundle_mul(bundle_mul(vx, tb, data),
                          bundle_inverse(vx, data), data)
        nvinv = covariant_octonion(
            field, lambda y: bundle_inverse(np.asarray(v_field(y)),
                                            field.data(y)), x, _EYE7[m],
            fd_step)
        rhs_gen = ad_t + bundle_mul(vx, nvinv, data)
        out_general = max(out_general, float(np.max(np.abs(lhs[1:]
                                                           - rhs_gen[1:]))))
    return {"const_norm": out_const, "general": out_general,
            "real_part": real_part,
            "deformed_defining": t_v.defining_residual}


def exterior_derivative_at(form_at, x: np.ndarray, k: int,
                           fd_step: float = 1e-3) -> np.ndarray:
    """d of a k-form field by central differences, full components."""
    x = np.asarray(x, dtype=float)
    d = np.empty((7,) * (k + 1))
    for m in range(7):
        dx = np.zeros(7)
        dx[m] = fd_step
        d[m] = (form_at(x + dx) - form_at(x - dx)) / (2 * fd_step)
    return (k + 1) * antisymmetrize(d)


def closedness_probe(field: PhiField, x: np.ndarray,
                     fd_step: float = 1e-3) -> tuple[float, float]:
    """Max-abs finite-difference d(phi) and d(psi) at a point."""
    dphi = exterior_derivative_at(field.phi, x, 3, fd_step)
    dpsi = exterior_derivative_at(field.psi, x, 4, fd_step)
    return float(np.max(np.abs(dphi))), float(np.max(np.abs(dpsi)))


# -- shipped field catalog ----------------------------------------------------

def constant_field(half_width: float = 1.0) -> PhiField:
    from .octonion import C3
    c = C3.copy()
    return PhiField(lambda x: c, [[-half_width, half_width]] * 7,
                    name="constant")


def sigma_warp_field(rate: float = 0.1, axis: int = 0, unit: int = 1,
                     half_width: float = 1.0) -> PhiField:
    """phi(x) = sigma_{V(x)}(phi0) with V(x) = exp(rate x^axis e_unit)."""
    data0 = metric_from_3form(PHI0)

    def v_at(x):
        return exponential(rate * float(x[axis]) * Octonion.basis(unit)).coeffs

    def phi_at(x):
        return sigma(Octonion(v_at(x)), PHI0, data0).comps

    field = PhiField(phi_at, [[-half_width, half_width]] * 7,
                     name="sigma_warp")
    field.v_at = v_at
    return field


def pullback_warp_field(strength: float = 0.05, half_width: float = 0.5,
                        seed: int = 2) -> PhiField:
    """phi(x) = A(x)* phi0 with A(x) = I + strength * sum_m x^m C_m for
    fixed randomly drawn C_m."""
    from .octonion import C3
    rng = np.random.default_rng(seed)
    cs = rng.standard_normal((7, 7, 7)) / np.sqrt(7)

    def phi_at(x):
        a = np.eye(7) + strength * np.einsum("m,mij->ij", x, cs)
        return pullback_3form(a, C3)

    return PhiField(phi_at, [[-half_width, half_width]] * 7,
                    name="pullback_warp")


def field_from_config(config: dict) -> PhiField:
    """Build a field from the JSON field-definition schema."""
    try:
        kind = config["kind"]
        params = config.get("params", {})
        domain = config.get("domain")
    except (KeyError, TypeError) as exc:
        raise BadConfig(f"bad field config: {exc}") from exc
    if kind == "constant":
        field = constant_field(**params)
    elif kind == "sigma_warp":
        field = sigma_warp_field(**params)
    elif kind == "pullback_warp":
        field = pullback_warp_field(**params)
    else:
        raise BadConfig(f"unknown field kind {kind!r}")
    if domain is not None:
        field.domain = np.asarray(domain, dtype=float)
    return field


def field_from_json(path) -> PhiField:
    with open(path, "r", encoding="utf-8") as fh:
        return field_from_config(json.load(fh))


FIELD_KINDS = ("constant", "sigma_warp", "pullback_warp")
