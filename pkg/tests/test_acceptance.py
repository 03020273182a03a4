"""Acceptance criteria 1-8, at the stated tolerances.

Each test prints one ``criterion N: PASS/FAIL`` line with the measured values.
"""
import time

import numpy as np
import pytest

from laxpi import (Curve, EndoSeriesInput, bcdh_classical, bcdh_log, heisenberg, iterate_T,
                   nilpotent_collapse, nilpotent_log, ode_evolve, random_curve,
                   riemann_product, series_apply, so3)
from laxpi.algebra import expm
from laxpi.checks import bcdh_suite, group_suite, identity_suite, lax_suite, transform_suite
from laxpi.curvegroup import sup_distance
from laxpi.lax import picard_remainder, remainder_bound

from conftest import heis_p2tq, so3_test_curve, unipotent_log


@pytest.fixture
def report(capsys):
    def _report(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return _report


def _rows(rows):
    return ", ".join(f"{r.name}={r.value:.3g}" for r in rows)


def test_criterion_1_oracle_agreement(report):
    t0 = time.perf_counter()
    phi = so3_test_curve(512)
    A = phi.algebra
    mats = {"riemann": riemann_product(phi, 4096).points[-1],
            "rk4": ode_evolve(phi, 1024).points[-1],
            "bcdh-log": expm(A.mat(bcdh_log(phi, 1e-9, check=False).samples[-1]))}
    elapsed = time.perf_counter() - t0
    keys = list(mats)
    devs = {f"{a}/{b}": float(np.linalg.norm(mats[a] - mats[b]))
            for i, a in enumerate(keys) for b in keys[i + 1:]}
    ok = all(v < 1e-5 for v in devs.values()) and elapsed < 10
    detail = ", ".join(f"{k}={v:.3g}" for k, v in devs.items()) + f", time={elapsed:.2f}s"
    report(1, ok, detail)


def test_criterion_2_nilpotent_exactness(report):
    phi = heis_p2tq(256)
    A = phi.algebra
    oracle = A.coords(unipotent_log(ode_evolve(phi, 4096).points[-1]))
    target = np.array([1.0, 1.0, -1.0 / 6.0])
    x_log = nilpotent_log(phi).samples[-1]
    x_col = nilpotent_collapse(phi, 1.0).coords
    const = iterate_T(phi, 2).constancy_deviation()
    errs = [np.max(np.abs(x - oracle)) for x in (x_log, x_col)]
    errs += [np.max(np.abs(x - target)) for x in (x_log, x_col)]
    ok = max(errs) < 1e-8 and const < 1e-9
    report(2, ok, f"log/oracle={errs[0]:.3g}, collapse/oracle={errs[1]:.3g}, "
                  f"vs (1,1,-1/6)={max(errs[2:]):.3g}, T^2 constancy={const:.3g}")


def test_criterion_3_lax_suite(report):
    phi = so3_test_curve(512)
    rows = lax_suite(phi, seed=42, tol=1e-12)
    # remainder bound over several (n, t) on random curves of both algebras
    rng = np.random.default_rng(42)
    worst = -np.inf
    for A in (so3(), heisenberg()):
        psi = random_curve(A, rng, amplitude=1.0)
        X = A.element(rng.normal(size=A.dim))
        for sign in ("+", "-"):
            for n in range(7):
                R = picard_remainder(psi, X, sign, n)
                worst = max(worst, float(np.max(A.norm(R.samples) - remainder_bound(psi, X, n))))
    ok = all(r.passed for r in rows) and worst <= 1e-14
    report(3, ok, _rows(rows) + f", max(R - bound)={worst:.3g}")


def test_criterion_4_curve_group(report):
    rows = []
    for A in (so3(), heisenberg()):
        for r in group_suite(A, seed=42, trials=20):
            r.name = f"{A.name}.{r.name}"
            rows.append(r)
    report(4, all(r.passed for r in rows), _rows(rows))


def test_criterion_5_transform(report):
    rows = transform_suite(so3_test_curve(512), seed=42)
    rows += [r for r in transform_suite(heis_p2tq(), seed=42)]
    report(5, all(r.passed for r in rows), _rows(rows))


def test_criterion_6_identities(report):
    rng = np.random.default_rng(42)
    rows = []
    for A in (so3(), heisenberg()):
        for _ in range(3):
            phi = random_curve(A, rng, amplitude=1.0)
            assert phi.sup_norm() <= 1.0 + 1e-12
            rows += identity_suite(phi, seed=int(rng.integers(2**31)))
    worst = {}
    for r in rows:
        worst[r.name] = max(worst.get(r.name, 0.0), r.value)
    ok = all(v < 1e-7 for v in worst.values())
    report(6, ok, ", ".join(f"{k}={v:.3g}" for k, v in worst.items()))


def test_criterion_7_bcdh(report):
    rows = bcdh_suite(so3_test_curve(256), seed=42) + bcdh_suite(heis_p2tq(), seed=42)
    H = heisenberg()
    cls = float(np.max(np.abs(bcdh_classical(H["P"], H["Q"], 1.0).coords - [1.0, 1.0, 0.5])))
    rng = np.random.default_rng(42)
    A = so3()
    comp = 0.0
    for r in np.linspace(0.05, 0.5, 10):
        Z = A.element(rng.normal(size=3))
        Z = Z * (r / Z.norm())
        adZ = A.ad(Z.coords)
        Y = A.element(rng.normal(size=3))
        w = series_apply("phi", EndoSeriesInput(A, adZ), Y)
        back = series_apply("psi", EndoSeriesInput(A, expm(adZ)), w)
        comp = max(comp, float(np.max(np.abs(back.coords - Y.coords))))
    ok = all(r.passed for r in rows) and cls < 1e-10 and comp < 1e-10
    report(7, ok, _rows(rows) + f", heis classical={cls:.3g}, psi(phi)={comp:.3g}")


def test_criterion_8_convergence_orders(report):
    phi = so3_test_curve(512)
    # Richardson self-extrapolation from the finest pair of each method
    R = lambda n: riemann_product(phi, n).points[-1]
    ref_r = 2 * R(8192) - R(4096)
    e = [np.linalg.norm(R(n) - ref_r) for n in (256, 512, 1024)]
    rr = [float(e[0] / e[1]), float(e[1] / e[2])]
    Y = lambda n: ode_evolve(phi, n).points[-1]
    ref_y = (16 * Y(256) - Y(128)) / 15
    e = [np.linalg.norm(Y(n) - ref_y) for n in (8, 16, 32)]
    ry = [float(e[0] / e[1]), float(e[1] / e[2])]
    ok = all(1.7 <= x <= 2.3 for x in rr) and all(13 <= x <= 19 for x in ry)
    report(8, ok, f"riemann ratios={[round(x, 4) for x in rr]}, rk4 ratios={[round(x, 3) for x in ry]}")
