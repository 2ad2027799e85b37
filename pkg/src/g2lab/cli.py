"""Command-line harness: randomized identity suites, convergence studies,
and cross-module consistency checks with seeded randomness and JSON
reports.

Per-trial random streams are counter-based (Philox keyed by a digest of
seed, suite and trial index), so serial and parallel runs produce
identical residuals.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .errors import BadConfig, G2LabError, IoError, UnknownSuite

SCHEMA_VERSION = 1


def trial_rng(seed: int, suite: str, trial: int) -> np.random.Generator:
    digest = hashlib.blake2b(f"{seed}:{suite}:{trial}".encode(),
                             digest_size=16).digest()
    return np.random.Generator(np.random.Philox(
        key=int.from_bytes(digest, "little")))


class RunConfig:
    """Seed, trial count, tolerance overrides, output path, parallelism."""

    def __init__(self, seed: int = 42, trials: int | None = None,
                 tolerances: dict | None = None, out: str | None = None,
                 jobs: int = 1) -> None:
        if jobs < 1:
            raise BadConfig("jobs must be >= 1")
        if trials is not None and trials < 1:
            raise BadConfig("trials must be >= 1")
        self.seed = int(seed)
        self.trials = trials
        self.tolerances = dict(tolerances or {})
        self.out = out
        self.jobs = jobs

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    def n_trials(self, default: int) -> int:
        return int(self.trials if self.trials is not None else default)


def _check(name: str, max_residual: float, tol: float) -> dict:
    return {"name": name, "max_residual": float(max_residual),
            "tolerance": float(tol), "pass": bool(max_residual <= tol)}


def map_trials(fn, n: int, config: RunConfig, suite: str) -> list:
    """Evaluate fn(rng, trial) over per-trial streams, threaded if asked."""
    def run(t):
        return fn(trial_rng(config.seed, suite, t), t)

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(run, range(n)))
    return [run(t) for t in range(n)]


# -- suites -------------------------------------------------------------------

def suite_octonion(config: RunConfig) -> list[dict]:
    from . import octonion as oc
    n = config.n_trials(10000)
    rng = trial_rng(config.seed, "octonion", 0)
    a = oc.random_octonions(rng, n)
    b = oc.random_octonions(rng, n)
    lhs = oc.norm_batch(oc.mul_batch(a, b))
    rhs = oc.norm_batch(a) * oc.norm_batch(b)
    checks = [_check("norm_multiplicativity",
                     np.max(np.abs(lhs - rhs) / rhs),
                     config.tol("norm_multiplicativity", 1e-12))]
    alt1 = oc.mul_batch(oc.mul_batch(a, a), b) - oc.mul_batch(
        a, oc.mul_batch(a, b))
    alt2 = oc.mul_batch(oc.mul_batch(a, b), b) - oc.mul_batch(
        a, oc.mul_batch(b, b))
    scale = (oc.norm_batch(a) ** 2 * oc.norm_batch(b))[:, None]
    checks.append(_check("alternativity",
                         max(np.max(np.abs(alt1) / scale),
                             np.max(np.abs(alt2)
                                    / (oc.norm_batch(a)
                                       * oc.norm_batch(b) ** 2)[:, None])),
                         config.tol("alternativity", 1e-13)))
    ai = oc.random_octonions(rng, n, imaginary=True)
    bi = oc.random_octonions(rng, n, imaginary=True)
    ci = oc.random_octonions(rng, n, imaginary=True)
    dots = np.einsum("nk,nk->n", ai, bi)
    moufang = (oc.mul_batch(ai, oc.mul_batch(bi, ci))
               + oc.mul_batch(bi, oc.mul_batch(ai, ci))
               + 2.0 * dots[:, None] * ci)
    nscale = (oc.norm_batch(ai) * oc.norm_batch(bi)
              * oc.norm_batch(ci))[:, None]
    checks.append(_check("moufang_adjacent",
                         np.max(np.abs(moufang) / nscale),
                         config.tol("moufang_adjacent", 1e-12)))
    # expansion of A(BC) for imaginary triples
    assoc = (oc.mul_batch(oc.mul_batch(ai, bi), ci)
             - oc.mul_batch(ai, oc.mul_batch(bi, ci)))
    phi_abc = np.einsum("nk,nk->n", oc.mul_batch(ai, bi), ci)
    one = np.zeros((n, 8))
    one[:, 0] = 1.0
    expansion = (oc.mul_batch(ai, oc.mul_batch(bi, ci))
                 + 0.5 * assoc + phi_abc[:, None] * one
                 + np.einsum("nk,nk->n", bi, ci)[:, None] * ai
                 - np.einsum("nk,nk->n", ai, ci)[:, None] * bi
                 + dots[:, None] * ci)
    checks.append(_check("product_expansion",
                         np.max(np.abs(expansion) / nscale),
                         config.tol("product_expansion", 1e-12)))
    # cross product laws
    cross = oc.mul_batch(ai, bi).copy()
    cross[:, 0] = 0.0
    norm_law = (np.einsum("nk,nk->n", cross, cross)
                - oc.norm_batch(ai) ** 2 * oc.norm_batch(bi) ** 2 + dots ** 2)
    checks.append(_check("cross_norm_law",
                         np.max(np.abs(norm_law)
                                / (oc.norm_batch(ai)
                                   * oc.norm_batch(bi)) ** 2),
                         config.tol("cross_norm_law", 1e-12)))
    bc_cross = oc.mul_batch(bi, ci).copy()
    bc_cross[:, 0] = 0.0
    double = oc.mul_batch(ai, bc_cross).copy()
    double[:, 0] = 0.0
    double_rhs = (-dots[:, None] * ci
                  + np.einsum("nk,nk->n", ai, ci)[:, None] * bi - 0.5 * assoc)
    checks.append(_check("double_cross",
                         np.max(np.abs(double - double_rhs) / nscale),
                         config.tol("double_cross", 1e-12)))
    # generalized Jacobi: sum_cyc [x,[y,z]] = -6 [x,y,z]
    jac = (oc.mul_batch(ai, bc_cross * 2) - oc.mul_batch(bc_cross * 2, ai))
    ca_cross = oc.mul_batch(ci, ai).copy()
    ca_cross[:, 0] = 0.0
    jac += (oc.mul_batch(bi, ca_cross * 2) - oc.mul_batch(ca_cross * 2, bi))
    ab_cross = oc.mul_batch(ai, bi).copy()
    ab_cross[:, 0] = 0.0
    jac += (oc.mul_batch(ci, ab_cross * 2) - oc.mul_batch(ab_cross * 2, ci))
    checks.append(_check("generalized_jacobi",
                         np.max(np.abs(jac + 6.0 * assoc) / nscale),
                         config.tol("generalized_jacobi", 1e-12)))
    # inverse, exponential, power, adjointness on a looped sample
    m = min(200, n)

    def one_trial(rng, t):
        from .octonion import (Octonion, conj, exponential, inverse,
                               left_matrix, mul, power)
        u = Octonion(oc.random_octonions(rng, 1, unit=True)[0])
        r1 = np.max(np.abs(mul(u, inverse(u)).coeffs
                           - Octonion.one().coeffs))
        w = Octonion(oc.random_octonions(rng, 1, imaginary=True)[0])
        r = np.linalg.norm(w.coeffs)
        ex = exponential(w)
        expect = np.cos(r) * Octonion.one().coeffs + np.sin(r) / r * w.coeffs
        r2 = np.max(np.abs(ex.coeffs - expect))
        r3 = np.max(np.abs(power(u, 3).coeffs
                           - mul(mul(u, u), u).coeffs))
        bq, aq, cq = (Octonion(v) for v in oc.random_octonions(rng, 3))
        r4 = abs((left_matrix(bq) @ aq.coeffs) @ cq.coeffs
                 - aq.coeffs @ (left_matrix(conj(bq)) @ cq.coeffs))
        r4 /= bq.norm() * aq.norm() * cq.norm()
        return max(r1, r2, r3, r4)

    res = map_trials(one_trial, m, config, "octonion")
    checks.append(_check("inverse_exp_power_adjoint", max(res),
                         config.tol("inverse_exp_power_adjoint", 1e-13)))
    return checks


def suite_exterior(config: RunConfig) -> list[dict]:
    from . import exterior as ext
    checks = []
    n_tr = config.n_trials(50)

    def one_trial(rng, t):
        n = int(rng.integers(3, 8))
        a_mat = rng.standard_normal((n, n))
        sym = 0.5 * (a_mat + a_mat.T)
        g = ext.Metric(np.eye(n) + 0.3 * sym / max(1.0,
                                                   np.linalg.norm(sym, 2)))
        worst = {"wedge": 0.0, "hodge2": 0.0, "defining": 0.0,
                 "interior": 0.0, "musical": 0.0, "interior_star": 0.0,
                 "vol_scale": 0.0, "antisym_proj": 0.0}
        p = int(rng.integers(1, min(3, n - 1) + 1))
        q = int(rng.integers(1, min(3, n - p) + 1))
        a = ext.AltTensor(n, p, rng.standard_normal((n,) * p))
        b = ext.AltTensor(n, q, rng.standard_normal((n,) * q))
        sc = max(a.max_abs() * b.max_abs(), 1e-30)
        worst["wedge"] = (ext.wedge(a, b)
                          - ((-1.0) ** (p * q)) * ext.wedge(b, a)).max_abs() / sc
        if p + q + 1 <= n:
            c = ext.AltTensor(n, 1, rng.standard_normal(n))
            assoc = (ext.wedge(ext.wedge(c, a), b)
                     - ext.wedge(c, ext.wedge(a, b))).max_abs()
            worst["wedge"] = max(worst["wedge"],
                                 assoc / max(sc * c.max_abs(), 1e-30))
        for k in range(0, n + 1):
            w = ext.AltTensor(n, k, rng.standard_normal((n,) * k))
            hh = ext.hodge(ext.hodge(w, g), g)
            worst["hodge2"] = max(worst["hodge2"],
                                  ((hh - ((-1.0) ** (k * (n - k))) * w)
                                   .max_abs() / max(w.max_abs(), 1e-30)))
            al = ext.AltTensor(n, k, rng.standard_normal((n,) * k))
            lhs = ext.form_inner(w, al, g) * ext.volume_form(g).comps
            rhs = ext.wedge(w, ext.hodge(al, g)).comps
            worst["defining"] = max(worst["defining"],
                                    np.max(np.abs(lhs - rhs))
                                    / max(w.max_abs() * al.max_abs(), 1e-30))
        x = rng.standard_normal(n)
        a3 = ext.AltTensor(n, min(3, n), rng.standard_normal(
            (n,) * min(3, n)))
        worst["interior"] = ext.interior(
            x, ext.interior(x, a3)).max_abs() / max(a3.max_abs(), 1e-30)
        w1 = rng.standard_normal(n)
        worst["musical"] = np.max(np.abs(
            ext.flat(ext.sharp(w1, g), g) - w1))
        worst["interior_star"] = ext.interior_star_residual(x, a3, g) \
            / max(a3.max_abs(), 1e-30)
        cpos = float(rng.uniform(0.5, 2.0))
        v1 = ext.volume_form(ext.Metric(cpos * g.g))
        v2 = cpos ** (n / 2.0) * ext.volume_form(g)
        worst["vol_scale"] = (v1 - v2).max_abs() / v2.max_abs()
        raw = rng.standard_normal((n,) * 3)
        once = ext.antisymmetrize(raw)
        worst["antisym_proj"] = np.max(np.abs(ext.antisymmetrize(once)
                                              - once))
        return worst

    rows = map_trials(one_trial, n_tr, config, "exterior")
    for key, tol in (("wedge", 1e-12), ("hodge2", 1e-11),
                     ("defining", 1e-11), ("interior", 1e-13),
                     ("musical", 1e-12), ("interior_star", 1e-11),
                     ("vol_scale", 1e-12), ("antisym_proj", 1e-15)):
        checks.append(_check(key, max(r[key] for r in rows),
                             config.tol(key, tol)))
    return checks


def suite_g2linear(config: RunConfig) -> list[dict]:
    from . import g2linear as g2
    from .exterior import AltTensor, form_inner, volume_form, Metric, wedge
    checks = []
    data0 = g2.metric_from_3form(g2.PHI0)
    id7 = Metric.euclidean(7)
    psi = g2.psi0()
    checks.append(_check("phi0_norm",
                         abs(form_inner(g2.PHI0, g2.PHI0, id7) - 7.0),
                         config.tol("phi0_norm", 1e-13)))
    checks.append(_check("psi0_norm",
                         abs(form_inner(psi, psi, id7) - 7.0),
                         config.tol("psi0_norm", 1e-13)))
    vol0 = volume_form(id7)
    checks.append(_check("phi_wedge_psi",
                         (wedge(g2.PHI0, psi) - 7.0 * vol0).max_abs(),
                         config.tol("phi_wedge_psi", 1e-13)))
    checks.append(_check("metric_of_phi0", max(
        np.max(np.abs(data0.g.g - np.eye(7))),
        (data0.vol - vol0).max_abs(),
        (data0.psi - psi).max_abs()),
        config.tol("metric_of_phi0", 1e-13)))
    mat = g2.r_operator_matrix(data0)
    eig = np.sort(np.linalg.eigvalsh(0.5 * (mat + mat.T)))
    spec = max(np.max(np.abs(eig[:14] + 1.0)), np.max(np.abs(eig[14:] - 2.0)))
    checks.append(_check("r_spectrum", spec, config.tol("r_spectrum", 1e-10)))

    n_forms = config.n_trials(100)

    def form_trial(rng, t):
        a = g2.random_gl7(rng)
        phi = AltTensor(7, 3, g2.pullback_3form(a, g2.PHI0.comps),
                        _skip_antisym=True)
        data = g2.metric_from_3form(phi)
        equiv = np.max(np.abs(data.g.g - a.T @ a)) / np.max(np.abs(a.T @ a))
        t_suite = max(g2.contraction_identity_residuals(phi, data).values())
        beta = AltTensor(7, 2, rng.standard_normal((7, 7)))
        sp = g2.split2(beta, data)
        idem = max((g2.split2(sp.part7, data).part14).max_abs(),
                   (g2.split2(sp.part14, data).part7).max_abs(),
                   (sp.part7 + sp.part14 - beta).max_abs())
        eta = AltTensor(7, 3, rng.standard_normal((7, 7, 7)))
        s3 = g2.split3(eta, data)
        recon = (s3.part1 + s3.part7 + s3.part27 - eta).max_abs()
        ortho = max(abs(form_inner(s3.part1, s3.part7, data.g)),
                    abs(form_inner(s3.part1, s3.part27, data.g)),
                    abs(form_inner(s3.part7, s3.part27, data.g)))
        fmap = max(
            (g2.map_f(data.g.g, data) - 3.0 * data.phi).max_abs(),
            g2.map_f(sp.part14.comps, data).max_abs())
        return {"equivariance": equiv, "contraction_suite": t_suite, "split2": idem,
                "split3_recon": recon,
                "split3_orth": ortho / max(eta.max_abs(), 1e-30),
                "f_map": fmap}

    rows = map_trials(form_trial, n_forms, config, "g2linear")
    for key, tol in (("equivariance", 1e-10), ("contraction_suite", 1e-10),
                     ("split2", 1e-11), ("split3_recon", 1e-10),
                     ("split3_orth", 1e-11), ("f_map", 1e-11)):
        checks.append(_check(key, max(r[key] for r in rows),
                             config.tol(key, tol)))

    n_triples = config.n_trials(1000)

    def triple_trial(rng, t):
        h1, h2, h4 = g2.random_admissible_triple(rng)
        mat = g2.g2_from_triple(h1, h2, h4)
        member = np.max(np.abs(g2.pullback_3form(mat, g2.PHI0.comps)
                               - g2.PHI0.comps))
        return max(member, abs(np.linalg.det(mat) - 1.0))

    rows = map_trials(triple_trial, n_triples, config, "g2linear-triples")
    checks.append(_check("g2_from_triple", max(rows),
                         config.tol("g2_from_triple", 1e-10)))

    rng = trial_rng(config.seed, "g2linear-lemma", 0)
    worst = 0.0
    for _ in range(10):
        res = g2.wedge_star_identity_residuals(data0, rng.standard_normal(7),
                                    rng.standard_normal(7))
        worst = max(worst, max(res.values()))
    checks.append(_check("wedge_star_pack", worst,
                         config.tol("wedge_star_pack", 1e-10)))
    return checks


def suite_deform(config: RunConfig) -> list[dict]:
    from . import deform as df
    from . import g2linear as g2
    from . import octonion as oc
    from .octonion import Octonion, exponential, mul, power
    checks = []
    data0 = g2.metric_from_3form(g2.PHI0)
    n = config.n_trials(100)

    def one_trial(rng, t):
        v = Octonion(oc.random_octonions(rng, 1, unit=True)[0])
        u = Octonion(oc.random_octonions(rng, 1, unit=True)[0])
        t_conj = df.conjugation_pullback_residual(v, g2.PHI0, data0)
        t_comp = df.composition_residual(u, v, g2.PHI0, data0)
        phi = g2.random_positive_3form(rng, cond_max=4.0)
        dp = g2.metric_from_3form(phi)
        sv = df.sigma(v, phi, dp)
        iso = np.max(np.abs(g2.metric_from_3form(sv).g.g - dp.g.g)) \
            / np.max(np.abs(dp.g.g))
        a, b = (Octonion(w) for w in oc.random_octonions(rng, 2))
        r1 = df.deformed_mul(a, b, v).coeffs
        r2 = mul(mul(a, v), mul(df.inverse(v), b)).coeffs
        routes = np.max(np.abs(r1 - r2)) / max(a.norm() * b.norm(), 1e-30)
        adj = max(df.adjoint_product_residuals(v, a, b).values()) \
            / max(a.norm() * b.norm(), 1e-30)
        m = df.ad_matrix7(v, data0)
        so7 = max(np.max(np.abs(m.T @ m - np.eye(7))),
                  abs(np.linalg.det(m) - 1.0))
        return {"conjugation_pullback": t_conj, "composition_law": t_comp, "isometry": iso,
                "routes": routes, "adjoint_ids": adj, "ad_so7": so7}

    rows = map_trials(one_trial, n, config, "deform")
    for key, tol in (("conjugation_pullback", 1e-11), ("composition_law", 1e-10),
                     ("isometry", 1e-10), ("routes", 1e-13),
                     ("adjoint_ids", 1e-12), ("ad_so7", 1e-10)):
        checks.append(_check(key, max(r[key] for r in rows),
                             config.tol(key, tol)))
    # fixed-product sweep: sigma_{V^3}(phi0) = phi0 exactly when V^3 real
    worst_eq = 0.0
    worst_neq = np.inf
    for theta, fixes in ((0.0, True), (np.pi / 3, True), (np.pi / 2, False),
                         (2 * np.pi / 3, True), (np.pi, True)):
        vv = exponential(theta * Octonion.basis(1))
        r = (df.sigma(power(vv, 3), g2.PHI0, data0) - g2.PHI0).max_abs()
        if fixes:
            worst_eq = max(worst_eq, r)
        else:
            worst_neq = min(worst_neq, r)
    checks.append(_check("v6_sweep_fixed", worst_eq,
                         config.tol("v6_sweep_fixed", 1e-12)))
    checks.append(_check("v6_sweep_moved", 1.0 / worst_neq,
                         config.tol("v6_sweep_moved", 1.0)))
    return checks


def suite_flat_loop(config: RunConfig) -> list[dict]:
    from .connection import flat_chart, loop_product
    checks = []
    n_tr = config.n_trials(100)

    def one_trial(rng, t):
        n = 4
        chart = flat_chart(n)
        e = rng.uniform(-0.5, 0.5, n)
        x = e + rng.uniform(-0.5, 0.5, n)
        y = e + rng.uniform(-0.5, 0.5, n)
        z = e + rng.uniform(-0.5, 0.5, n)
        h = 1e-2
        m_xy = loop_product(chart, e, x, y, h)
        linear = np.max(np.abs(m_xy - (x + y - e)))
        comm = np.max(np.abs(m_xy - loop_product(chart, e, y, x, h)))
        assoc = np.max(np.abs(
            loop_product(chart, e, m_xy, z, h)
            - loop_product(chart, e, x, loop_product(chart, e, y, z, h), h)))
        units = max(np.max(np.abs(loop_product(chart, e, x, e, h) - x)),
                    np.max(np.abs(loop_product(chart, e, e, y, h) - y)))
        return {"linear": linear, "commutative": comm,
                "associative": assoc, "units": units}

    rows = map_trials(one_trial, n_tr, config, "flat-loop")
    for key in ("linear", "commutative", "associative", "units"):
        checks.append(_check(key, max(r[key] for r in rows),
                             config.tol(key, 1e-12)))
    return checks


def suite_akivis(config: RunConfig) -> list[dict]:
    from .connection import (akivis_check, cartan_schouten_chart,
                             integrate_geodesic, sphere2_chart)
    checks = []
    h_list = (1e-2, 5e-3, 2.5e-3)
    cs = cartan_schouten_chart(0.0)
    rep = akivis_check(cs, np.zeros(7), h_list, h_ode=1.0 / 16)
    checks.append(_check("cs_r1_at_h", rep["r1"][0],
                         config.tol("cs_r1_at_h", 0.05)))
    checks.append(_check("cs_r1_rate", rep["r1"][1] / rep["r1"][0],
                         config.tol("cs_r1_rate", 1.0 / 1.8)))
    checks.append(_check("cs_r2_at_h", rep["r2"][0],
                         config.tol("cs_r2_at_h", 0.05)))
    # the three-step table decreases down to the solver noise floor
    floor = config.tol("cs_table_floor", 1e-8)
    table_ok = all(rep["r1"][i + 1] <= max(rep["r1"][i], floor)
                   and rep["r2"][i + 1] <= max(rep["r2"][i], floor)
                   for i in range(len(h_list) - 1))
    checks.append(_check("cs_table_decreasing", 0.0 if table_ok else 1.0,
                         0.5))
    sp = sphere2_chart()
    rep_s = akivis_check(sp, np.array([1.2, 0.3]), h_list[:2],
                         h_ode=1.0 / 16)
    checks.append(_check("torsionless_alpha", rep_s["alpha_norm"][0],
                         config.tol("torsionless_alpha", 0.05)))
    checks.append(_check("torsionless_alpha_rate",
                         rep_s["alpha_norm"][1]
                         / max(rep_s["alpha_norm"][0], 1e-300),
                         config.tol("torsionless_alpha_rate", 1.0 / 1.8)))
    checks.append(_check("torsionless_r2", rep_s["r2"][0],
                         config.tol("torsionless_r2", 1e-3)))
    # integrator order on the sphere oracle
    x0 = np.array([1.1, 0.4])
    v0 = np.array([0.3, 0.5])

    def endpoint_error(h):
        end = integrate_geodesic(sp, x0, v0, 1.0, h).endpoint
        def embed(t, p):
            return np.array([np.sin(t) * np.cos(p),
                             np.sin(t) * np.sin(p), np.cos(t)])
        eth = np.array([np.cos(x0[0]) * np.cos(x0[1]),
                        np.cos(x0[0]) * np.sin(x0[1]), -np.sin(x0[0])])
        eph = np.array([-np.sin(x0[0]) * np.sin(x0[1]),
                        np.sin(x0[0]) * np.cos(x0[1]), 0.0])
        vec = v0[0] * eth + v0[1] * eph
        s = np.linalg.norm(vec)
        exact = np.cos(s) * embed(*x0) + np.sin(s) * vec / s
        return np.linalg.norm(embed(*end) - exact)

    errs = [endpoint_error(h) for h in h_list]
    orders = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
    checks.append(_check("integrator_order_low", 4.5 - min(orders),
                         config.tol("integrator_order_low", 1.0)))
    return checks


def suite_cartan(config: RunConfig) -> list[dict]:
    from . import cartan as cs
    from .g2linear import psi0
    from .octonion import C3
    checks = []
    worst = 0.0
    for k in (1.0, 2.0):
        worst = max(worst, max(cs.self_duality_residuals(k).values()))
    checks.append(_check("self_duality", worst,
                         config.tol("self_duality", 1e-12)))
    worst = max(cs.ch_beta_residual(a) for a in (0.0, 0.25, 1.0))
    checks.append(_check("ch_beta_closed_form", worst,
                         config.tol("ch_beta_closed_form", 1e-12)))
    fp0 = cs.cs_tensors(0.0)
    fp1 = cs.cs_tensors(1.0)
    fph = cs.cs_tensors(0.5)
    fam = max(np.max(np.abs(fp0.R)),
              np.max(np.abs(fp1.R - cs._alt4(fp1.R))),
              np.max(np.abs(fph.S)))
    checks.append(_check("family_points", fam,
                         config.tol("family_points", 1e-12)))
    psi = psi0().comps
    c3_contraction = np.max(np.abs(np.einsum("ijk,ajk->ia", C3, C3)
                            - 6.0 * np.eye(7)))
    c4_contraction = np.max(np.abs(np.einsum("ijkl,ajkl->ia", psi, psi)
                            - 24.0 * np.eye(7)))
    checks.append(_check("cross_module_contractions", max(c3_contraction, c4_contraction),
                         config.tol("cross_module_contractions", 1e-12)))
    # chart fit ratio between two family parameters
    from .connection import fit_fundamental_tensors
    reps = {}
    for a in (0.0, 0.25):
        rep = fit_fundamental_tensors(cs.cs_chart(a), np.zeros(7), h=1e-2,
                                      richardson=False, h_ode=1.0 / 16)
        reps[a] = rep.alpha
    mask = np.abs(C3) > 0.5
    ratio = reps[0.25][mask] / reps[0.0][mask]
    expect = (1.0 - 2 * 0.25) / (1.0 - 2 * 0.0)
    checks.append(_check("fit_ratio",
                         float(np.max(np.abs(ratio - expect))) / expect,
                         config.tol("fit_ratio", 0.05)))
    checks.append(_check("fit_alpha_param0",
                         float(np.max(np.abs(2 * reps[0.0] - C3))),
                         config.tol("fit_alpha_param0", 0.05)))
    return checks


def suite_g2field(config: RunConfig) -> list[dict]:
    from . import field as fld
    from .g2linear import split3
    from .exterior import AltTensor
    from .octonion import Octonion
    checks = []
    x = np.array([0.05, -0.1, 0.2, 0.0, 0.1, -0.05, 0.15])
    cf = fld.constant_field()
    t0 = fld.g2_torsion(cf, x, 1e-3)
    checks.append(_check("constant_torsion", np.max(np.abs(t0.T)),
                         config.tol("constant_torsion", 1e-9)))
    sw = fld.sigma_warp_field(rate=0.1)
    res1 = fld.torsion_transformation_residuals(cf, sw.v_at, x, 1e-3)
    res2 = fld.torsion_transformation_residuals(cf, sw.v_at, x, 5e-4)
    checks.append(_check("torsion_law", res1["const_norm"],
                         config.tol("torsion_law", 1e-6)))
    checks.append(_check("torsion_law_rate",
                         res2["const_norm"] / max(res1["const_norm"], 1e-300),
                         config.tol("torsion_law_rate", 0.4)))
    pw = fld.pullback_warp_field(strength=0.05)
    xs = 0.5 * x
    ta = fld.g2_torsion(pw, xs, 1e-3)
    tb = fld.g2_torsion(pw, xs, 5e-4)
    checks.append(_check("defining_rate",
                         tb.defining_residual
                         / max(ta.defining_residual, 1e-300),
                         config.tol("defining_rate", 0.4)))
    gi = sw.data(x).g.g_inv
    t1 = fld.g2_torsion(sw, x, 1e-3)
    parts = [t1.t1, t1.t0, t1.t7, t1.t14]
    ortho = max(abs(np.einsum("ij,kl,ik,jl->", parts[i], parts[j], gi, gi))
                for i in range(4) for j in range(i + 1, 4))
    split_sum = np.max(np.abs(sum(parts) - t1.T))
    checks.append(_check("torsion_split", max(ortho, split_sum),
                         config.tol("torsion_split", 1e-10)))
    nphi = fld.nabla_phi(sw, x, 1e-3)
    s3 = split3(AltTensor(7, 3, nphi[0], _skip_antisym=True), sw.data(x))
    checks.append(_check("vector_part_only",
                         max(abs(s3.f), float(np.max(np.abs(s3.h0)))),
                         config.tol("vector_part_only", 1e-7)))
    rng = trial_rng(config.seed, "g2field", 0)
    a = Octonion(rng.standard_normal(8))
    b = Octonion(rng.standard_normal(8))
    defect, pred = fld.leibniz_defect(sw, x, a, b, np.eye(7)[0], 1e-3)
    checks.append(_check("leibniz_defect",
                         float(np.max(np.abs(defect.coeffs - pred.coeffs))),
                         config.tol("leibniz_defect", 1e-6)))
    # metric compatibility of D on the warp field
    data = sw.data(x)
    afield = lambda y: a.coeffs + 0.3 * y[1] * np.eye(8)[3]
    bfield = lambda y: b.coeffs + 0.2 * y[0] * np.eye(8)[5]
    da = fld.octonion_covariant_derivative(sw, x, np.eye(7)[0], afield,
                                           1e-3, torsion=t1)
    db = fld.octonion_covariant_derivative(sw, x, np.eye(7)[0], bfield,
                                           1e-3, torsion=t1)

    def inner(u, v, dat):
        return u[0] * v[0] + u[1:] @ (dat.g.g @ v[1:])

    h = 1e-3
    dx0 = h * np.eye(7)[0]
    lhs = (inner(afield(x + dx0), bfield(x + dx0), sw.data(x + dx0))
           - inner(afield(x - dx0), bfield(x - dx0),
                   sw.data(x - dx0))) / (2 * h)
    compat = abs(lhs - inner(da.coeffs, bfield(x), data)
                 - inner(afield(x), db.coeffs, data))
    checks.append(_check("d_metric_compat", compat,
                         config.tol("d_metric_compat", 1e-6)))
    # closedness probes across the catalog
    dphi0, dpsi0_ = fld.closedness_probe(cf, x, 1e-3)
    dphi1, dpsi1 = fld.closedness_probe(sw, x, 1e-3)
    floor = max(dphi0, dpsi0_, 1e-12)
    checks.append(_check("closedness_constant", max(dphi0, dpsi0_),
                         config.tol("closedness_constant", 1e-10)))
    checks.append(_check("closedness_warp_signal",
                         floor * 10.0 / max(dphi1, dpsi1),
                         config.tol("closedness_warp_signal", 1.0)))
    return checks


def suite_clifford(config: RunConfig) -> list[dict]:
    from . import clifford as cl
    from . import deform as df
    from . import g2linear as g2
    from . import octonion as oc
    from .octonion import Octonion, left_matrix, mul
    checks = []
    # small-signature structural checks
    e1 = cl.CliffordElement.vector(0, 1, [1.0])
    c_model = (cl.clifford_mul(e1, e1)
               + cl.CliffordElement.scalar(0, 1)).max_abs()
    a1 = cl.CliffordElement.vector(0, 2, [1, 0])
    a2 = cl.CliffordElement.vector(0, 2, [0, 1])
    e12 = cl.clifford_mul(a1, a2)
    quat = max((cl.clifford_mul(e12, e12)
                + cl.CliffordElement.scalar(0, 2)).max_abs(),
               (cl.clifford_mul(a2, e12) - a1).max_abs(),
               (cl.clifford_mul(e12, a1) - a2).max_abs())
    checks.append(_check("small_models", max(c_model, quat),
                         config.tol("small_models", 1e-14)))
    n = config.n_trials(100)

    def one_trial(rng, t):
        u = rng.standard_normal(7)
        v = rng.standard_normal(7)
        cu = cl.CliffordElement.vector(0, 7, u)
        cv = cl.CliffordElement.vector(0, 7, v)
        anti = cl.clifford_mul(cu, cv) + cl.clifford_mul(cv, cu)
        ident = (anti - cl.CliffordElement.scalar(
            0, 7, 2 * cl.vector_inner(0, 7, u, v))).max_abs()
        x = cl.CliffordElement(0, 7, rng.standard_normal(128))
        y = cl.CliffordElement(0, 7, rng.standard_normal(128))
        z = cl.CliffordElement(0, 7, rng.standard_normal(128))
        sc = x.max_abs() * y.max_abs() * z.max_abs()
        assoc = (cl.clifford_mul(cl.clifford_mul(x, y), z)
                 - cl.clifford_mul(x, cl.clifford_mul(y, z))).max_abs() / sc
        rev = (cl.reversion(cl.clifford_mul(x, y))
               - cl.clifford_mul(cl.reversion(y),
                                 cl.reversion(x))).max_abs() \
            / (x.max_abs() * y.max_abs())
        # orthonormal imaginary pair: anticommutator of L-matrices vanishes
        q1 = rng.standard_normal(7)
        q1 /= np.linalg.norm(q1)
        q2 = rng.standard_normal(7)
        q2 -= (q2 @ q1) * q1
        q2 /= np.linalg.norm(q2)
        o1 = Octonion.from_parts(0.0, q1)
        o2 = Octonion.from_parts(0.0, q2)
        l1, l2 = left_matrix(o1), left_matrix(o2)
        anticomm = np.max(np.abs(l1 @ l2 + l2 @ l1))
        kappa = cl.enveloping_residual(
            Octonion(oc.random_octonions(rng, 1, imaginary=True)[0]),
            Octonion(oc.random_octonions(rng, 1, imaginary=True)[0]))
        # j map and composition
        xi = cl.SpinorPoint(oc.random_octonions(rng, 1, unit=True)[0])
        n1 = cl.SpinorPoint(rng.standard_normal(8))
        n2 = cl.SpinorPoint(rng.standard_normal(8))
        j_iso = abs(n1.comps @ n2.comps
                    - cl.j_map(n1, xi).dot(cl.j_map(n2, xi)))
        big_v = Octonion(oc.random_octonions(rng, 1)[0])
        equi = np.max(np.abs(
            cl.j_map(cl.clifford_action(big_v, n1), xi).coeffs
            - df.deformed_mul(big_v, cl.j_map(n1, xi),
                              Octonion(xi.comps)).coeffs))
        return {"clifford_identity": ident, "associativity": assoc,
                "reversion": rev, "orth_anticommutator": anticomm,
                "kappa_residual": kappa, "j_isometry": j_iso,
                "j_equivariance": equi}

    rows = map_trials(one_trial, n, config, "clifford")
    for key, tol in (("clifford_identity", 1e-13),
                     ("associativity", 1e-12), ("reversion", 1e-13),
                     ("orth_anticommutator", 1e-13),
                     ("kappa_residual", 1e-13), ("j_isometry", 1e-12),
                     ("j_equivariance", 1e-12)):
        checks.append(_check(key, max(r[key] for r in rows),
                             config.tol(key, tol)))
    # octonion associator is generically nonzero (paired contrast)
    rng = trial_rng(config.seed, "clifford-contrast", 0)
    a, b, c = (Octonion(w) for w in oc.random_octonions(rng, 3))
    assoc_oct = np.max(np.abs((mul(mul(a, b), c)
                               - mul(a, mul(b, c))).coeffs))
    checks.append(_check("octonion_nonassoc_contrast", 1.0 / assoc_oct,
                         config.tol("octonion_nonassoc_contrast", 10.0)))
    data0 = g2.metric_from_3form(g2.PHI0)
    u, w = (Octonion(z) for z in oc.random_octonions(rng, 2, unit=True))
    comp = (df.sigma(u, df.sigma(w, g2.PHI0, data0))
            - df.sigma(mul(u, w), g2.PHI0, data0)).max_abs()
    checks.append(_check("spinor_sigma_composition", comp,
                         config.tol("spinor_sigma_composition", 1e-10)))
    return checks


SUITES = {
    "octonion": suite_octonion,
    "exterior": suite_exterior,
    "g2linear": suite_g2linear,
    "deform": suite_deform,
    "flat-loop": suite_flat_loop,
    "akivis": suite_akivis,
    "cartan": suite_cartan,
    "g2field": suite_g2field,
    "clifford": suite_clifford,
}


def run_suite(name: str, config: RunConfig) -> dict:
    """Run a registered suite and assemble its report."""
    fn = SUITES.get(name)
    if fn is None:
        raise UnknownSuite(f"unknown suite {name!r}; have {sorted(SUITES)}")
    start = time.monotonic()
    checks = fn(config)
    wall = time.monotonic() - start
    return {
        "schema": SCHEMA_VERSION,
        "suite": name,
        "seed": config.seed,
        "trials": config.trials,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
        "wall_time_s": wall,
    }


# -- table emission -----------------------------------------------------------

def emit_tables(out_dir) -> list[str]:
    """Write the octonion, resolved rank-4, and Cl(p,q) tables as JSON."""
    from . import clifford as cl
    from . import octonion as oc
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        table = oc.basis_table()
        path = out_dir / "octonion_table.json"
        path.write_text(json.dumps({
            "basis": "1,e1..e7",
            "entries": [[{"index": k, "sign": s} for (k, s) in row]
                        for row in table],
        }, indent=1, sort_keys=True))
        written.append(str(path))
        c4 = oc.C4
        nz = [{"ijkl": [int(a) + 1 for a in idx], "value": float(c4[idx])}
              for idx in zip(*np.nonzero(c4))]
        path = out_dir / "c4_table.json"
        path.write_text(json.dumps({
            "convention": "associator [e_j, e_k, e_l] = 2 c_ijkl e_i, "
                          "resolved by brute force over the product table; "
                          "the model 4-form's components are the negative",
            "entries": nz,
        }, indent=1, sort_keys=True))
        written.append(str(path))
        cls = {}
        for p in range(0, 5):
            for q in range(0, 5 - p):
                cls[f"cl_{p}_{q}"] = cl.basis_mul_table(p, q)
        path = out_dir / "clifford_tables.json"
        path.write_text(json.dumps(cls, sort_keys=True))
        written.append(str(path))
        return written
    except OSError as exc:
        raise IoError(str(exc)) from exc


# -- entry point --------------------------------------------------------------

def _parse_tol(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise BadConfig(f"--tol expects key=value, got {item!r}")
        key, _, val = item.partition("=")
        try:
            out[key] = float(val)
        except ValueError as exc:
            raise BadConfig(f"bad tolerance value in {item!r}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="g2lab",
        description="randomized verification suites for the octonion / "
                    "G2-structure / geodesic-loop laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("verify", help="run a verification suite")
    run.add_argument("suite")
    run.add_argument("--seed", type=int, default=42)
    run.add_argument("--trials", type=int, default=None)
    run.add_argument("--tol", action="append", metavar="key=val")
    run.add_argument("--out", default=None)
    run.add_argument("--jobs", type=int, default=1)
    tab = sub.add_parser("tables", help="emit multiplication tables")
    tab.add_argument("--out", required=True)
    charts = sub.add_parser("charts", help="chart utilities")
    charts.add_argument("action", choices=["list"])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "verify":
            config = RunConfig(seed=args.seed, trials=args.trials,
                               tolerances=_parse_tol(args.tol),
                               out=args.out, jobs=args.jobs)
            report = run_suite(args.suite, config)
            payload = json.dumps(report, indent=1, sort_keys=True)
            if config.out:
                Path(config.out).write_text(payload + "\n")
            else:
                print(payload)
            for c in report["checks"]:
                status = "pass" if c["pass"] else "FAIL"
                print(f"[{status}] {c['name']}: "
                      f"{c['max_residual']:.3e} <= {c['tolerance']:.1e}",
                      file=sys.stderr)
            return 0 if report["pass"] else 1
        if args.command == "tables":
            for path in emit_tables(args.out):
                print(path)
            return 0
        if args.command == "charts":
            from .connection import BUILTIN_CHARTS
            from .field import FIELD_KINDS
            print("charts:", ", ".join(BUILTIN_CHARTS))
            print("fields:", ", ".join(FIELD_KINDS))
            return 0
    except (UnknownSuite, BadConfig) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except G2LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
