"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Tolerances are pinned here and must not be loosened.
"""
import json

import numpy as np

from sov6v import formfactors as ff
from sov6v import tq
from sov6v import tqinhom as ti
from sov6v.cli import main, parse_config, report_json, run_suite
from sov6v.elliptic import quasi_periodicity_residuals
from sov6v.errors import IncompleteEnumeration
from sov6v.repspace import Representation, dybe_residual, gauge_y1_check, quantum_det_check
from sov6v.spectrum import (brute_spectrum, collinearity, eigenstate_from_values, match_solutions,
                            scalar_product_det, solve_discrete_system, verify_discrete_system)
from sov6v.suites import DEFAULT_KAPPAS, tq_member_checks, tqinhom_member_checks

from acceptance_log import record
from helpers import bundle, model, random_points

EVEN_XY = [(0, 1), (1, 0), (1, 1)]
ALL_XY = [(0, 0), (0, 1), (1, 0), (1, 1)]


def _cases(Ns):
    return [(N, x, y) for N in Ns for x, y in ALL_XY if not (N % 2 == 0 and (x, y) == (0, 0))]


def test_criterion_01_theta_quasi_periodicity():
    z = random_points(np.random.default_rng(101), 100, (-3, 3), (-0.8, 0.8))
    res = quasi_periodicity_residuals(z, 1j)
    worst = max(res.values())
    assert record(1, worst < 1e-12, f"max residual {worst:.1e} over {len(res)} rules at 100 points")


def test_criterion_02_dybe_and_gauge():
    rng = np.random.default_rng(102)
    dybe = gauge = 0.0
    for y in (0, 1):
        p = model(2, 1, y)
        for _ in range(50):
            l1, l2, l3 = random_points(rng, 3)
            t = complex(rng.uniform(0.2, 2.5) + 1j * rng.uniform(-0.3, 0.3))
            dybe = max(dybe, dybe_residual(l1, l2, l3, t, p))
            gauge = max(gauge, gauge_y1_check(l1, l2, t, p))
    ok = dybe < 1e-11 and gauge < 1e-11
    assert record(2, ok, f"DYBE {dybe:.1e}, gauge {gauge:.1e}")


def test_criterion_03_commutativity():
    rng = np.random.default_rng(103)
    cases = [(N, x, y) for N in (2, 3, 4) for x, y in EVEN_XY] + [(3, 0, 0)]
    worst = 0.0
    for N, x, y in cases:
        rep = Representation(model(N, x, y))
        for _ in range(3):
            l1, l2 = random_points(rng, 2)
            T1, T2 = rep.transfer(l1).block(0), rep.transfer(l2).block(0)
            worst = max(worst, np.abs(T1 @ T2 - T2 @ T1).max() / (np.abs(T1).max() * np.abs(T2).max()))
    assert record(3, worst < 1e-10, f"max scaled commutator {worst:.1e} over {len(cases)} models")


def test_criterion_04_quantum_determinant():
    rng = np.random.default_rng(104)
    qd = inv = 0.0
    for N, x, y in _cases((2, 3)):
        p = model(N, x, y)
        rep = Representation(p)
        for lam in random_points(rng, 3):
            a, d, i = quantum_det_check(lam, p, rep)
            qd, inv = max(qd, a, d), max(inv, i)
    ok = qd < 1e-10 and inv < 1e-10
    assert record(4, ok, f"q-det {qd:.1e}, inversion {inv:.1e}")


def test_criterion_05_sov_spectrum():
    disc = newton = eig = iso = 0.0
    counts_ok = True
    for N, x, y in _cases((2, 3)) + [(4, 1, 1)]:
        b = bundle(N, x, y)
        disc = max(disc, max(verify_discrete_system(m.t, b.p) for m in b.spec))
        for m in b.spec:
            eig = max(eig, collinearity(eigenstate_from_values(m.t, "right", b.p, b.frame), m.right),
                      collinearity(eigenstate_from_values(m.t, "left", b.p, b.frame), m.left))
        if N <= 3:
            try:
                found = solve_discrete_system(b.p, seed=7)
            except IncompleteEnumeration:
                counts_ok = False
                continue
            counts_ok &= len(found) == b.p.dim
            newton = max(newton, match_solutions(found, [m.t for m in b.spec], b.p))
        base = np.array([m.t.vals for m in b.spec])
        if N <= 3:
            for k in DEFAULT_KAPPAS:
                other = np.array([m.t.vals for m in brute_spectrum(b.p.with_kappa(k))])
                iso = max(iso, float(np.max(np.abs(other - base) / np.abs(base))))
    ok = disc < 1e-9 and counts_ok and newton < 1e-8 and eig < 1e-8 and iso < 1e-10
    assert record(5, ok, f"system {disc:.1e}, all roots found {counts_ok} (match {newton:.1e}), "
                         f"eigvec {eig:.1e}, isospectral {iso:.1e}")


def test_criterion_06_scalar_products():
    same = distinct = 0.0
    for N, x, y in _cases((2, 3)):
        b = bundle(N, x, y)
        c = b.frame.c_tilde
        L = [eigenstate_from_values(m.t, "left", b.p, b.frame) for m in b.spec]
        R = [eigenstate_from_values(m.t, "right", b.p, b.frame) for m in b.spec]
        for i, mi in enumerate(b.spec):
            for j, mj in enumerate(b.spec):
                det = c * scalar_product_det(mi.t, mj.t, b.p)
                if i == j:
                    same = max(same, abs(det - L[i] @ R[i]) / abs(L[i] @ R[i]))
                else:
                    scale = np.sqrt(abs(L[i] @ R[i]) * abs(L[j] @ R[j]))
                    distinct = max(distinct, abs(det) / scale)
    ok = same < 1e-8 and distinct < 1e-9
    assert record(6, ok, f"diagonal {same:.1e}, off-diagonal {distinct:.1e}")


def test_criterion_07_homogeneous_tq():
    worst = {}
    for N in (2, 4):
        for x, y in EVEN_XY:
            b = bundle(N, x, y)
            for m in b.spec:
                res, _ = tq_member_checks(m, b.p, b.frame)
                for k, v in res.items():
                    worst[k] = max(worst.get(k, 0.0), v)
    limits = {"tq.sigma": 1e-8, "tq.bethe": 1e-8, "tq.t_roundtrip": 1e-8, "tq.sum_rule": 1e-8,
              "tq.wronskian1": 1e-8, "tq.wronskian2": 1e-8, "tq.dbeta_state": 1e-7}
    ok = all(worst[k] < v for k, v in limits.items())
    detail = ", ".join(f"{k.split('.')[1]} {worst[k]:.1e}" for k in limits)
    assert record(7, ok, detail)


def test_criterion_08_inhomogeneous_tq():
    worst = {}
    for x, y in EVEN_XY:
        b = bundle(2, x, y)
        for m in b.spec:
            res, _, _ = tqinhom_member_checks(m, b.p, b.frame, b.rep, beta=0.3)
            for k, v in res.items():
                worst[k] = max(worst.get(k, 0.0), v)
    limits = {"tqinhom.branch": 1e-9, "tqinhom.residual": 1e-8, "tqinhom.det_expansion": 1e-10,
              "tqinhom.state_right": 1e-7, "tqinhom.state_left": 1e-7}
    ok = all(worst[k] < v for k, v in limits.items())
    detail = ", ".join(f"{k.split('.')[1]} {worst[k]:.1e}" for k in limits)
    assert record(8, ok, detail)


def test_criterion_09_form_factors():
    oracle = branches = spin = height = ip = 0.0
    for N, x, y in _cases((2, 3)):
        b = bundle(N, x, y)
        reports, sums = ff.ff_crosscheck_suite(b.p, b.spec, b.frame, b.rep)
        oracle = max(oracle, max(r.residual for r in reports))
        branches = max(branches, max(s["branches"] for s in sums))
        spin = max(spin, max(s["spin_sum"] for s in sums))
        height = max(height, max(s["height_sum"] for s in sums))
        for n in range(1, N + 1):
            for i in (0, 1):
                for j in (0, 1):
                    ip = max(ip, ff.inverse_problem_check(n, i, j, b.p, b.rep))
            for k in range(N + 1):
                ip = max(ip, ff.height_reconstruction_check(n, k, b.p, b.rep))
    ok = oracle < 1e-7 and branches < 1e-8 and spin < 1e-8 and height < 1e-8 and ip < 1e-8
    assert record(9, ok, f"oracle {oracle:.1e}, branches {branches:.1e}, completeness "
                         f"{max(spin, height):.1e}, reconstruction {ip:.1e}")


def test_criterion_10_reproducible_reports(tmp_path, monkeypatch):
    cfg_text = json.dumps({"N": 2, "x": 1, "y": 1, "seed": 42, "out": str(tmp_path / "out")})
    cfg = parse_config(cfg_text)
    in_process = report_json(run_suite(cfg)) == report_json(run_suite(cfg, threads=2))
    path = tmp_path / "cfg.json"
    path.write_text(cfg_text)
    blobs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("SOV6V_THREADS", threads)
        code = main(["all", "--config", str(path)])
        blobs.append((code, (tmp_path / "out" / "report.json").read_bytes()))
    ok = in_process and blobs[0][0] == 0 and blobs[0] == blobs[1]
    assert record(10, ok, f"exit codes {[b[0] for b in blobs]}, byte-identical {blobs[0][1] == blobs[1][1]}")
