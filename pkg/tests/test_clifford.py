"""Clifford algebras, the enveloping relation of left translations, and
the spinor <-> octonion dictionary."""

import numpy as np
import pytest

from g2lab import clifford as cl
from g2lab import deform as df
from g2lab import g2linear as g2
from g2lab import octonion as oc
from g2lab.errors import NotImaginary, SignatureMismatch, ZeroReference
from g2lab.octonion import Octonion, left_matrix, mul


def test_dimension():
    for p in range(3):
        for q in range(3):
            assert cl.CliffordElement(p, q).coeffs.size == 2 ** (p + q)


def test_cl01_complex_model():
    e1 = cl.CliffordElement.vector(0, 1, [1.0])
    sq = cl.clifford_mul(e1, e1)
    assert sq.coeffs[0] == -1.0 and sq.coeffs[1] == 0.0
    # commutative
    a = cl.CliffordElement(0, 1, [2.0, 3.0])
    b = cl.CliffordElement(0, 1, [-1.0, 0.5])
    assert cl.clifford_mul(a, b).allclose(cl.clifford_mul(b, a), 0)


def test_cl02_quaternion_model():
    i = cl.CliffordElement.vector(0, 2, [1, 0])
    j = cl.CliffordElement.vector(0, 2, [0, 1])
    k = cl.clifford_mul(i, j)
    assert cl.clifford_mul(k, k).coeffs[0] == -1.0
    assert cl.clifford_mul(i, i).coeffs[0] == -1.0
    assert cl.clifford_mul(j, k).allclose(i, 0)
    assert cl.clifford_mul(k, i).allclose(j, 0)
    assert cl.clifford_mul(j, i).allclose(-1.0 * k, 0)


def test_unit_element():
    rng = np.random.default_rng(0)
    a = cl.CliffordElement(2, 2, rng.standard_normal(16))
    one = cl.CliffordElement.scalar(2, 2)
    assert cl.clifford_mul(one, a).allclose(a, 0)
    assert cl.clifford_mul(a, one).allclose(a, 0)


def test_clifford_identity_on_vectors():
    rng = np.random.default_rng(1)
    for (p, q) in ((3, 0), (0, 3), (1, 3), (0, 7)):
        u, v = rng.standard_normal((2, p + q))
        cu = cl.CliffordElement.vector(p, q, u)
        cv = cl.CliffordElement.vector(p, q, v)
        anti = cl.clifford_mul(cu, cv) + cl.clifford_mul(cv, cu)
        want = cl.CliffordElement.scalar(p, q,
                                         2.0 * cl.vector_inner(p, q, u, v))
        assert anti.allclose(want, 1e-13)


def test_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        cl.clifford_mul(cl.CliffordElement.scalar(0, 2),
                        cl.CliffordElement.scalar(2, 0))


def test_involutions():
    b2 = cl.CliffordElement.blade(0, 7, [1, 3])
    assert cl.reversion(b2).allclose(-1.0 * b2, 0)
    b3 = cl.CliffordElement.blade(0, 7, [0, 2, 5])
    assert cl.reversion(b3).allclose(-1.0 * b3, 0)
    assert cl.grade_involution(b3).allclose(-1.0 * b3, 0)
    assert cl.clifford_conjugation(b2).allclose(-1.0 * b2, 0)
    rng = np.random.default_rng(2)
    x = cl.CliffordElement(0, 4, rng.standard_normal(16))
    y = cl.CliffordElement(0, 4, rng.standard_normal(16))
    assert cl.reversion(cl.clifford_mul(x, y)).allclose(
        cl.clifford_mul(cl.reversion(y), cl.reversion(x)), 1e-12)
    assert cl.reversion(cl.reversion(x)).allclose(x, 0)
    assert cl.grade_involution(cl.grade_involution(x)).allclose(x, 0)


def test_blade_norm():
    v = cl.CliffordElement.vector(3, 0, [0.6, 0.8, 0.0])
    assert abs(cl.blade_norm(v) - 1.0) < 1e-14
    b = cl.CliffordElement.blade(3, 0, [0, 1, 2])
    assert abs(cl.blade_norm(b) - 1.0) < 1e-14
    # multiplicativity on versors
    rng = np.random.default_rng(3)
    vs = [cl.CliffordElement.vector(0, 7, rng.standard_normal(7))
          for _ in range(3)]
    prod = cl.clifford_mul(cl.clifford_mul(vs[0], vs[1]), vs[2])
    expect = np.prod([cl.blade_norm(v) for v in vs])
    assert abs(cl.blade_norm(prod) - expect) < 1e-11 * expect


def test_cl07_associative_vs_octonion():
    rng = np.random.default_rng(4)
    x, y, z = (cl.CliffordElement(0, 7, rng.standard_normal(128))
               for _ in range(3))
    assoc = (cl.clifford_mul(cl.clifford_mul(x, y), z)
             - cl.clifford_mul(x, cl.clifford_mul(y, z)))
    scale = x.max_abs() * y.max_abs() * z.max_abs()
    assert assoc.max_abs() < 1e-12 * scale
    a, b, c = (Octonion(w) for w in oc.random_octonions(rng, 3))
    oct_assoc = mul(mul(a, b), c) - mul(a, mul(b, c))
    assert np.max(np.abs(oct_assoc.coeffs)) > 0.1


def test_enveloping_relation():
    e1, e2 = Octonion.basis(1), Octonion.basis(2)
    l1, l2 = left_matrix(e1), left_matrix(e2)
    assert np.max(np.abs(l1 @ l2 + l2 @ l1)) == 0.0
    assert np.max(np.abs(l1 @ l1 + np.eye(8))) == 0.0
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = Octonion(oc.random_octonions(rng, 1, imaginary=True)[0])
        b = Octonion(oc.random_octonions(rng, 1, imaginary=True)[0])
        assert cl.enveloping_residual(a, b) < 1e-13
    assert cl.ENVELOPING_KAPPA == 2.0
    with pytest.raises(NotImaginary):
        cl.enveloping_residual(Octonion.one(), e1)


def test_j_map_examples():
    rng = np.random.default_rng(6)
    xi = cl.SpinorPoint(oc.random_octonions(rng, 1, unit=True)[0])
    assert np.max(np.abs(cl.j_map(xi, xi).coeffs
                         - Octonion.one().coeffs)) < 1e-13
    eta = cl.clifford_action(Octonion.basis(1), xi)
    assert np.max(np.abs(cl.j_map(eta, xi).coeffs
                         - Octonion.basis(1).coeffs)) < 1e-13
    # mutually inverse
    a = Octonion(rng.standard_normal(8))
    assert np.max(np.abs(cl.j_map(cl.j_inverse(a, xi), xi).coeffs
                         - a.coeffs)) < 1e-13
    # isometry
    n1 = cl.SpinorPoint(rng.standard_normal(8))
    n2 = cl.SpinorPoint(rng.standard_normal(8))
    assert abs(n1.comps @ n2.comps
               - cl.j_map(n1, xi).dot(cl.j_map(n2, xi))) < 1e-12
    with pytest.raises(ZeroReference):
        cl.j_map(n1, cl.SpinorPoint(np.zeros(8)))


def test_j_map_equivariance():
    rng = np.random.default_rng(7)
    xi = cl.SpinorPoint(oc.random_octonions(rng, 1, unit=True)[0])
    xio = Octonion(xi.comps)
    eta = cl.SpinorPoint(rng.standard_normal(8))
    v = Octonion(rng.standard_normal(8))
    lhs = cl.j_map(cl.clifford_action(v, eta), xi)
    rhs = df.deformed_mul(v, cl.j_map(eta, xi), xio)
    assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) < 1e-12
    # double action equals the deformed-composition route
    w = Octonion(oc.random_octonions(rng, 1, unit=True)[0])
    lhs2 = cl.j_map(cl.clifford_action(v, cl.clifford_action(w, eta)), xi)
    rhs2 = df.deformed_mul(v, df.deformed_mul(w, cl.j_map(eta, xi), xio),
                           xio)
    assert np.max(np.abs(lhs2.coeffs - rhs2.coeffs)) < 1e-12


def test_sigma_from_spinor():
    rng = np.random.default_rng(8)
    data0 = g2.metric_from_3form(g2.PHI0)
    assert cl.sigma_from_spinor(Octonion.one(), g2.PHI0,
                                data0).allclose(g2.PHI0, 0)
    u, v = (Octonion(w) for w in oc.random_octonions(rng, 2, unit=True))
    two_step = cl.sigma_from_spinor(
        u, cl.sigma_from_spinor(v, g2.PHI0, data0))
    one_step = cl.sigma_from_spinor(mul(u, v), g2.PHI0, data0)
    assert (two_step - one_step).max_abs() < 1e-10
    # matches the deformation module directly
    s1 = cl.sigma_from_spinor(Octonion.basis(1), g2.PHI0, data0)
    s2 = df.sigma(Octonion.basis(1), g2.PHI0, data0)
    assert (s1 - s2).max_abs() < 1e-12
    # reference structure of a unit spinor
    xi = cl.SpinorPoint(oc.random_octonions(rng, 1, unit=True)[0])
    phi_xi = cl.reference_structure(xi, data0)
    assert (phi_xi - df.sigma(Octonion(xi.comps), g2.PHI0,
                              data0)).max_abs() == 0.0


def test_basis_mul_table_shape():
    table = cl.basis_mul_table(1, 1)
    assert len(table) == 4 and len(table[0]) == 4
    assert table[0][3] == {"mask": 3, "sign": 1}
