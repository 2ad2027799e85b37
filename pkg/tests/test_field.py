"""G2-structure fields: finite-difference torsion, the octonion covariant
derivative, and the deformation law for the torsion."""

import numpy as np
import pytest

from g2lab import field as fld
from g2lab.errors import BadConfig, LeftDomain, NormDrift
from g2lab.exterior import AltTensor
from g2lab.g2linear import split3
from g2lab.octonion import Octonion

X0 = np.array([0.05, -0.1, 0.2, 0.0, 0.1, -0.05, 0.15])


@pytest.fixture(scope="module")
def warp():
    return fld.sigma_warp_field(rate=0.1)


@pytest.fixture(scope="module")
def warp_torsion(warp):
    return fld.g2_torsion(warp, X0, 1e-3)


def test_constant_field_torsion_free():
    cf = fld.constant_field()
    t = fld.g2_torsion(cf, X0, 1e-3)
    assert np.max(np.abs(t.T)) < 1e-9
    assert t.defining_residual < 1e-9
    dphi, dpsi = fld.closedness_probe(cf, X0, 1e-3)
    assert dphi < 1e-10 and dpsi < 1e-10


def test_warp_field_torsion(warp, warp_torsion):
    t = warp_torsion
    assert np.max(np.abs(t.T)) > 0.05
    assert t.defining_residual < 1e-9
    # parts sum to T and are mutually orthogonal in the induced metric
    gi = warp.data(X0).g.g_inv
    parts = [t.t1, t.t0, t.t7, t.t14]
    assert np.max(np.abs(sum(parts) - t.T)) < 1e-12

    def ip(a, b):
        return np.einsum("ij,kl,ik,jl->", a, b, gi, gi)

    for i in range(4):
        for j in range(i + 1, 4):
            assert abs(ip(parts[i], parts[j])) < 1e-10


def test_defining_relation_second_order():
    pw = fld.pullback_warp_field(strength=0.05)
    x = 0.5 * X0
    r1 = fld.g2_torsion(pw, x, 1e-3).defining_residual
    r2 = fld.g2_torsion(pw, x, 5e-4).defining_residual
    assert r2 < 0.4 * r1


def test_derivative_in_vector_type_part(warp):
    nphi = fld.nabla_phi(warp, X0, 1e-3)
    data = warp.data(X0)
    for m in (0, 3):
        sp = split3(AltTensor(7, 3, nphi[m], _skip_antisym=True), data)
        assert abs(sp.f) < 1e-7
        assert np.max(np.abs(sp.h0)) < 1e-7


def test_covariant_derivative_examples(warp, warp_torsion):
    cf = fld.constant_field()
    # constant field, constant octonion
    d0 = fld.octonion_covariant_derivative(
        cf, X0, np.eye(7)[0], lambda y: Octonion.one().coeffs, 1e-3)
    assert np.max(np.abs(d0.coeffs)) < 1e-12
    # plain derivative when torsion-free
    a_field = lambda y: y[0] * Octonion.basis(2).coeffs
    d1 = fld.octonion_covariant_derivative(cf, X0, np.eye(7)[0], a_field,
                                           1e-3)
    assert np.max(np.abs(d1.coeffs - Octonion.basis(2).coeffs)) < 1e-10
    # D_X 1 = -T(X) on the torsionful field
    d2 = fld.octonion_covariant_derivative(
        warp, X0, np.eye(7)[0], lambda y: Octonion.one().coeffs, 1e-3,
        torsion=warp_torsion)
    tx = fld.torsion_octonion(warp_torsion.T, np.eye(7)[0], warp.data(X0))
    assert np.max(np.abs(d2.coeffs + tx)) < 1e-7


def test_quasi_derivation_and_metric_compat(warp, warp_torsion):
    rng = np.random.default_rng(0)
    data = warp.data(X0)
    ca, cb = rng.standard_normal((2, 8))
    afield = lambda y: ca + 0.3 * y[1] * np.eye(8)[3]
    bfield = lambda y: cb + 0.2 * y[0] * np.eye(8)[5]
    prod = lambda y: fld.bundle_mul(afield(y), bfield(y), warp.data(y))
    dab = fld.octonion_covariant_derivative(warp, X0, np.eye(7)[0], prod,
                                            1e-3, torsion=warp_torsion)
    na = fld.covariant_octonion(warp, afield, X0, np.eye(7)[0], 1e-3)
    db = fld.octonion_covariant_derivative(warp, X0, np.eye(7)[0], bfield,
                                           1e-3, torsion=warp_torsion)
    rhs = fld.bundle_mul(na, bfield(X0), data) \
        + fld.bundle_mul(afield(X0), db.coeffs, data)
    assert np.max(np.abs(dab.coeffs - rhs)) < 1e-6

    def inner(u, v, dat):
        return u[0] * v[0] + u[1:] @ (dat.g.g @ v[1:])

    da = fld.octonion_covariant_derivative(warp, X0, np.eye(7)[0], afield,
                                           1e-3, torsion=warp_torsion)
    h = 1e-3
    dx = h * np.eye(7)[0]
    lhs = (inner(afield(X0 + dx), bfield(X0 + dx), warp.data(X0 + dx))
           - inner(afield(X0 - dx), bfield(X0 - dx),
                   warp.data(X0 - dx))) / (2 * h)
    assert abs(lhs - inner(da.coeffs, bfield(X0), data)
               - inner(afield(X0), db.coeffs, data)) < 1e-6


def test_leibniz_defect(warp):
    cf = fld.constant_field()
    rng = np.random.default_rng(1)
    a = Octonion(rng.standard_normal(8))
    b = Octonion(rng.standard_normal(8))
    d0, p0 = fld.leibniz_defect(cf, X0, a, b, np.eye(7)[0], 1e-3)
    assert np.max(np.abs(d0.coeffs)) < 1e-9
    # real argument kills the associator
    ar = Octonion.from_parts(1.3, np.zeros(7))
    d1, _ = fld.leibniz_defect(warp, X0, ar, b, np.eye(7)[0], 1e-3)
    assert np.max(np.abs(d1.coeffs)) < 1e-9
    d2, p2 = fld.leibniz_defect(warp, X0, a, b, np.eye(7)[0], 1e-3)
    assert np.max(np.abs(d2.coeffs)) > 1e-3
    assert np.max(np.abs(d2.coeffs - p2.coeffs)) < 1e-6


def test_torsion_law(warp):
    cf = fld.constant_field()
    # constant V = 1: both sides vanish
    res = fld.torsion_transformation_residuals(cf, lambda y: Octonion.one().coeffs, X0,
                                1e-3)
    assert res["const_norm"] < 1e-10
    res1 = fld.torsion_transformation_residuals(cf, warp.v_at, X0, 1e-3)
    assert res1["const_norm"] < 1e-6
    assert res1["general"] < 1e-6
    res2 = fld.torsion_transformation_residuals(cf, warp.v_at, X0, 5e-4)
    assert res2["const_norm"] < 0.4 * res1["const_norm"]
    with pytest.raises(NormDrift):
        fld.torsion_transformation_residuals(cf, lambda y: 2.0 * Octonion.one().coeffs,
                              X0, 1e-3)


def test_torsion_law_torsionful_base():
    pw = fld.pullback_warp_field(strength=0.05)
    x = 0.5 * X0

    def v_at(y):
        v = fld.exponential(0.1 * float(y[0]) * Octonion.basis(1)).coeffs
        d = pw.data(y)
        n2 = v[0] ** 2 + v[1:] @ (d.g.g @ v[1:])
        return v / np.sqrt(n2)

    res = fld.torsion_transformation_residuals(pw, v_at, x, 1e-3)
    assert res["general"] < 1e-5
    assert res["const_norm"] < 1e-5


def test_closedness_probe_catalog(warp):
    dphi, dpsi = fld.closedness_probe(warp, X0, 1e-3)
    assert max(dphi, dpsi) > 1e-2
    t = fld.g2_torsion(warp, X0, 1e-3)
    assert np.max(np.abs(t.T)) > 1e-2
    pw = fld.pullback_warp_field(strength=0.05)
    dphi2, dpsi2 = fld.closedness_probe(pw, 0.5 * X0, 1e-3)
    assert max(dphi2, dpsi2) > 1e-3


def test_domain_and_config():
    cf = fld.constant_field(half_width=0.2)
    with pytest.raises(LeftDomain):
        fld.g2_torsion(cf, np.full(7, 0.1999), 1e-2)
    field = fld.field_from_config({"kind": "sigma_warp",
                                   "params": {"rate": 0.2},
                                   "domain": [[-2, 2]] * 7})
    assert field.domain[0, 1] == 2.0
    with pytest.raises(BadConfig):
        fld.field_from_config({"kind": "nope"})


def test_field_json_roundtrip(tmp_path):
    import json
    cfg = {"kind": "pullback_warp", "params": {"strength": 0.03},
           "domain": [[-0.4, 0.4]] * 7}
    path = tmp_path / "field.json"
    path.write_text(json.dumps(cfg))
    field = fld.field_from_json(path)
    assert field.name == "pullback_warp"
    assert fld.g2_torsion(field, np.zeros(7), 1e-3).T.shape == (7, 7)
