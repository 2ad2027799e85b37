"""Isometric deformations: adjoint map, sigma_V, deformed products."""

import math

import numpy as np
import pytest

from g2lab import deform as df
from g2lab import g2linear as g2
from g2lab import octonion as oc
from g2lab.errors import ZeroDivisor
from g2lab.octonion import Octonion, exponential, inverse, mul, power


@pytest.fixture(scope="module")
def data0():
    return g2.metric_from_3form(g2.PHI0)


def test_ad_basics(data0):
    rng = np.random.default_rng(0)
    a = Octonion(rng.standard_normal(8))
    assert df.ad(Octonion.one(), a).allclose(a, 1e-15)
    v = Octonion(oc.random_octonions(rng, 1, unit=True)[0])
    assert np.max(np.abs(df.ad_matrix7(3.7 * v, data0)
                         - df.ad_matrix7(v, data0))) < 1e-13
    with pytest.raises(ZeroDivisor):
        df.ad(Octonion.zero(), a)


def test_ad_two_routes(data0):
    rng = np.random.default_rng(1)
    v = Octonion(oc.random_octonions(rng, 1, unit=True)[0])
    m = df.ad_matrix7(v, data0)
    for _ in range(5):
        im = Octonion(oc.random_octonions(rng, 1, imaginary=True)[0])
        via_products = df.ad(v, im)
        assert abs(via_products.real) < 1e-13
        assert np.max(np.abs(via_products.coeffs[1:] - m @ im.coeffs[1:])) \
            < 1e-13
    # norm and real-part preservation off the imaginary subspace
    a = Octonion(rng.standard_normal(8))
    ada = df.ad(v, a)
    assert abs(ada.norm() - a.norm()) < 1e-13
    assert abs(ada.real - a.real) < 1e-13


def test_ad_in_so7(data0):
    rng = np.random.default_rng(2)
    for _ in range(10):
        v = Octonion(oc.random_octonions(rng, 1, unit=True)[0])
        m = df.ad_matrix7(v, data0)
        assert np.max(np.abs(m.T @ m - np.eye(7))) < 1e-12
        assert abs(np.linalg.det(m) - 1.0) < 1e-10


def test_sigma_examples(data0):
    assert df.sigma(Octonion.one(), g2.PHI0, data0).allclose(g2.PHI0, 0)
    s1 = df.sigma(Octonion.basis(1), g2.PHI0, data0)
    d1 = g2.metric_from_3form(s1)
    assert np.max(np.abs(d1.g.g - np.eye(7))) < 1e-13
    with pytest.raises(ZeroDivisor):
        df.sigma(Octonion.zero(), g2.PHI0, data0)


def test_sigma_isometry_random_base():
    rng = np.random.default_rng(3)
    for _ in range(10):
        phi = g2.random_positive_3form(rng, cond_max=4.0)
        dp = g2.metric_from_3form(phi)
        v = Octonion(oc.random_octonions(rng, 1, unit=True)[0])
        sv = df.sigma(v, phi, dp)
        dv = g2.metric_from_3form(sv)
        assert np.max(np.abs(dv.g.g - dp.g.g)) \
            < 1e-10 * np.max(np.abs(dp.g.g))


def test_conjugation_pullback(data0):
    assert df.conjugation_pullback_residual(Octonion.one(), g2.PHI0, data0) < 1e-14
    rng = np.random.default_rng(4)
    for _ in range(10):
        v = Octonion(oc.random_octonions(rng, 1, unit=True)[0])
        assert df.conjugation_pullback_residual(v, g2.PHI0, data0) < 1e-11
    v2 = Octonion(2.0 * oc.random_octonions(rng, 1, unit=True)[0])
    assert df.conjugation_pullback_residual(v2, g2.PHI0, data0) < 1e-11


def test_composition_law(data0):
    rng = np.random.default_rng(5)
    for _ in range(10):
        u, v = (Octonion(w) for w in oc.random_octonions(rng, 2, unit=True))
        assert df.composition_residual(u, v, g2.PHI0, data0) < 1e-10
    # both readings of the product UV coincide when the right factor is V
    u, v = (Octonion(w) for w in oc.random_octonions(rng, 2, unit=True))
    assert df.deformed_mul(u, v, v).allclose(mul(u, v), 1e-13)


def test_deformed_mul_routes(data0):
    rng = np.random.default_rng(6)
    a, b = (Octonion(w) for w in oc.random_octonions(rng, 2))
    v = Octonion(oc.random_octonions(rng, 1, unit=True)[0])
    r1 = df.deformed_mul(a, b, v)
    r2 = mul(mul(a, v), mul(inverse(v), b))
    assert r1.allclose(r2, 1e-13)
    sv = df.sigma(v, g2.PHI0, data0)
    dsv = g2.metric_from_3form(sv)
    r3 = Octonion(df.bundle_mul(a.coeffs, b.coeffs, dsv))
    assert r1.allclose(r3, 1e-12)
    # real deformer reduces to the plain product
    r4 = df.deformed_mul(a, b, Octonion.from_parts(2.5, np.zeros(7)))
    assert r4.allclose(mul(a, b), 1e-13)


def test_deformed_product_container():
    rng = np.random.default_rng(9)
    v = Octonion(oc.random_octonions(rng, 1, unit=True)[0])
    phi = g2.random_positive_3form(rng, cond_max=4.0)
    dp = df.DeformedProduct(phi, v)
    assert dp.sigma_phi.allclose(df.sigma(v, phi, dp.base_data), 0)
    g_base = dp.base_data.g.g
    g_def = g2.metric_from_3form(dp.sigma_phi).g.g
    assert np.max(np.abs(g_def - g_base)) < 1e-10 * np.max(np.abs(g_base))


def test_adjoint_product_identities():
    rng = np.random.default_rng(7)
    v = Octonion(oc.random_octonions(rng, 1, unit=True)[0])
    a, b = (Octonion(w) for w in oc.random_octonions(rng, 2))
    res = df.adjoint_product_residuals(v, a, b)
    assert max(res.values()) < 1e-12
    res1 = df.adjoint_product_residuals(Octonion.one(), a, b)
    assert max(res1.values()) == 0.0
    # a real kills the associator terms
    res2 = df.adjoint_product_residuals(
        v, Octonion.from_parts(1.7, np.zeros(7)), b)
    assert max(res2.values()) < 1e-13


def test_fixed_structure_sweep(data0):
    # sigma_{V^3}(phi0) = phi0 exactly when V^3 is real
    for theta, fixes in ((0.0, True), (math.pi / 3, True),
                         (math.pi / 2, False), (2 * math.pi / 3, True),
                         (math.pi, True)):
        v = exponential(theta * Octonion.basis(1))
        r = (df.sigma(power(v, 3), g2.PHI0, data0) - g2.PHI0).max_abs()
        if fixes:
            assert r < 1e-12, theta
        else:
            assert r > 0.5, theta
    # sigma_V itself fixes phi0 only for real V
    v = exponential(math.pi / 3 * Octonion.basis(1))
    assert (df.sigma(v, g2.PHI0, data0) - g2.PHI0).max_abs() > 0.5
