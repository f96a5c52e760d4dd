"""Acceptance criteria 1-9, one test each.

Every test prints ``PASS criterion N: ...`` or ``FAIL criterion N: ...``
followed by its sub-checks, and records the headline for the terminal
summary.  Tolerances are fixed here and never adjusted to make a check pass.
"""

import subprocess
import sys
import time

import numpy as np

from conflation import (
    CES,
    Agent,
    Classification,
    CobbDouglas,
    Economy,
    Equilibrium,
    Linear,
    PiecewiseMeasure,
    catalog,
    d_omega,
    induce,
    map_bundle,
    random_perturbation,
    redefine_claims,
    solve_linear,
    solve_opposed,
    verify_equilibrium,
)
from conflation.analysis import (
    aligned_grid,
    cobb_douglas_weighted_optimum,
    competitive_configuration,
    optimal_k,
    pareto_dominates,
    price_ratio_sweep,
    utility_sweep,
)
from conflation.solvers import cobb_douglas_supporting_prices, opposed_derivative
from conflation import repro
from oracles import eisenberg_gale_grid, random_linear_economy, random_opposed_economy

LEB = PiecewiseMeasure.lebesgue()


class Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.checks = []
        self.notes = []

    def note(self, text):
        self.notes.append(text)

    def check(self, label, ok, detail=""):
        self.checks.append((label, bool(ok), detail))

    def report(self, record_property):
        ok = all(c[1] for c in self.checks)
        head = f"{'PASS' if ok else 'FAIL'} criterion {self.number}: {self.title}"
        print(head)
        for label, passed, detail in self.checks:
            print(f"    [{'ok' if passed else 'FAILED'}] {label}" + (f" ({detail})" if detail else ""))
        for text in self.notes:
            print(f"    [info] {text}")
        record_property("acceptance", head)
        failed = [c[0] for c in self.checks if not c[1]]
        assert not failed, f"criterion {self.number} failed: {failed}"


def _solve(e, cuts):
    return solve_linear(induce(e, Classification(cuts)))


def _sup(a, b):
    return float(np.max(np.abs(np.asarray(a, float) - np.asarray(b, float))))


def test_criterion_1_pareto_one(record_property):
    cr = Criterion(1, "three-agent refinement: utilities and dominance")
    t0 = time.perf_counter()
    e = catalog.pareto_one()
    cfg_pi, eq_pi = competitive_configuration(e, Classification([0, 0.5, 1]))
    cfg_rho, eq_rho = competitive_configuration(e, Classification([0, 1 / 3, 1]))
    dominates = pareto_dominates(e, cfg_rho, cfg_pi)
    dt = time.perf_counter() - t0
    err_pi, err_rho = _sup(eq_pi.utilities, [2 / 3, 1 / 3, 1 / 3]), _sup(eq_rho.utilities, [1, 0.5, 0.5])
    cr.check("utilities under pi = (2/3, 1/3, 1/3) within 1e-7", err_pi <= 1e-7, f"err {err_pi:.2e}")
    cr.check("utilities under rho = (1, 1/2, 1/2) within 1e-7", err_rho <= 1e-7, f"err {err_rho:.2e}")
    cr.check("rho configuration Pareto-dominates pi", dominates)
    cr.check("runtime < 1 s", dt < 1.0, f"{dt:.3f} s")
    cr.report(record_property)


def test_criterion_2_relative_scarcity(record_property):
    cr = Criterion(2, "relative-scarcity price ratio and utility ratio")
    t0 = time.perf_counter()
    e = catalog.relative_scarcity()
    grid = aligned_grid(199, [1 / 6, 1 / 2, 5 / 6])
    sweep = price_ratio_sweep(e, catalog.relative_scarcity_family, 0, 3, grid)
    dt = time.perf_counter() - t0
    phi = np.array([catalog.relative_scarcity_ratio(t) for t in grid])
    ratio = sweep.price_ratio
    u_ratio = sweep.utilities[:, 0] / sweep.utilities[:, 1]
    cr.check("199-point grid inside (0, 1), all points solved",
             len(grid) == 199 and grid[0] > 0 and grid[-1] < 1 and not sweep.failures)
    err = _sup(ratio, phi)
    cr.check("phi(t) vs four-branch closed form, sup <= 1e-5", err <= 1e-5, f"sup {err:.2e}")
    cr.check("grid min = 2/3 within 2e-3", abs(ratio.min() - 2 / 3) <= 2e-3, f"min {ratio.min():.6f}")
    cr.check("grid max = 3/2 within 2e-3", abs(ratio.max() - 1.5) <= 2e-3, f"max {ratio.max():.6f}")
    err_u = _sup(u_ratio, phi)
    cr.check("u1/u2 matches phi(t) within 1e-5", err_u <= 1e-5, f"sup {err_u:.3g}")
    mirrored = np.array([catalog.relative_scarcity_ratio(1 - t) for t in grid])
    cr.note(f"u1/u2 vs phi(1 - t): sup {_sup(u_ratio, mirrored):.2e}")
    cr.check("runtime < 30 s", dt < 30, f"{dt:.2f} s")
    cr.report(record_property)


def test_criterion_3_opposed(record_property):
    cr = Criterion(3, "opposed preferences")
    t0 = time.perf_counter()
    e = catalog.opposed_linear()
    etas = np.arange(1, 100) / 100
    sweep = utility_sweep(e, catalog.threshold_family, etas)
    table = np.array([catalog.opposed_utilities(t) for t in etas])
    err1, err2 = _sup(sweep.utilities[:, 0], table[:, 0]), _sup(sweep.utilities[:, 1], table[:, 1])
    cr.check("V1*(eta) vs table, sup <= 1e-6 over 99 points", err1 <= 1e-6, f"sup {err1:.2e}")
    cr.check("V2*(eta) vs table, sup <= 1e-6 over 99 points", err2 <= 1e-6, f"sup {err2:.2e}")
    arg = sweep.argmax_welfare
    cr.check("welfare argmax at 0.5 +- one step", abs(arg - 0.5) <= 0.01 + 1e-12, f"argmax {arg}")

    rng = np.random.default_rng(20240611)
    worst = 0.0
    for _ in range(50):
        re, pi = random_opposed_economy(rng)
        worst = max(worst, _sup(solve_opposed(re, pi).utilities, solve_linear(induce(re, pi)).utilities))
    cr.check("solve_opposed vs solve_linear on 50 random economies within 1e-6", worst <= 1e-6, f"max {worst:.2e}")

    def fd(cuts, j, h=1e-4):
        def v1(c):
            cs = list(cuts)
            cs[j] = c
            return solve_linear(induce(e, Classification(cs))).utilities[0]
        return (v1(cuts[j] + h) - v1(cuts[j] - h)) / (2 * h)

    regimes = {"xi <= 0": [0, 0.45, 0.9, 1], "0 < xi < 1": [0, 0.45, 0.55, 1], "xi >= 1": [0, 0.1, 0.55, 1]}
    for name, cuts in regimes.items():
        pi = Classification(cuts)
        rep = solve_opposed(e, pi)
        in_regime = {"xi <= 0": rep.xi <= 0, "0 < xi < 1": 0 < rep.xi < 1, "xi >= 1": rep.xi >= 1}[name]
        gap = abs(opposed_derivative(e, pi) - fd(cuts, rep.disputed_index))
        cr.check(f"derivative vs central difference, {name}, within 1e-4", in_regime and gap <= 1e-4,
                 f"xi {rep.xi:.3f}, gap {gap:.2e}")
    dt = time.perf_counter() - t0
    cr.check("runtime < 30 s", dt < 30, f"{dt:.2f} s")
    cr.report(record_property)


def test_criterion_4_position_switch(record_property):
    cr = Criterion(4, "trading-position switch")
    e = catalog.position_switch()
    eq_pi = _solve(e, [0, 1 / 3, 2 / 3, 1])
    eq_rho = _solve(e, [0, 1 / 3, 2 / 3, 5 / 6, 1])
    x_pi, x_rho = eq_pi.allocation[0], eq_rho.allocation[0]
    cr.check("under pi agent 1 consumes only cell A = [0, 1/3)",
             x_pi[0] > 1e-7 and np.all(np.abs(x_pi[1:]) <= 1e-7), np.round(x_pi, 9).tolist())
    cr.check("pi bundle equals (1/3, 0, 0) within 1e-7", _sup(x_pi, [1 / 3, 0, 0]) <= 1e-7)
    cr.check("under rho agent 1 consumes only cell B = [1/3, 2/3)",
             x_rho[1] > 1e-7 and abs(x_rho[0]) <= 1e-7 and np.all(np.abs(x_rho[2:]) <= 1e-7),
             np.round(x_rho, 9).tolist())
    spread = float(np.ptp(eq_rho.prices))
    cr.check("all rho-prices equal within 1e-7", spread <= 1e-7, f"spread {spread:.2e}")
    dv = abs(eq_pi.utilities[0] - eq_rho.utilities[0])
    cr.check("V1 identical within 1e-7", dv <= 1e-7, f"diff {dv:.2e}")
    cr.report(record_property)


def test_criterion_5_welfare_refinement(record_property):
    cr = Criterion(5, "welfare under refinements, n = 2")
    e = catalog.welfare_refinement(2)
    base = _solve(e, [0, 0.5, 1]).utilities.sum()
    for t in (0.1, 0.25, 0.4):
        d = abs(_solve(e, [0, t, 0.5, 1]).utilities.sum() - base)
        cr.check(f"split A at {t}: welfare within 1e-8", d <= 1e-8, f"diff {d:.2e}")
    for t in (0.6, 0.75, 0.9):
        drop = base - _solve(e, [0, 0.5, t, 1]).utilities.sum()
        cr.check(f"split B at {t}: welfare drops by > 1e-4", drop > 1e-4, f"drop {drop:.4g}")
    cr.report(record_property)


def test_criterion_6_optimal_k(record_property):
    cr = Criterion(6, "optimal number of commodities")
    for c in (0.1, 0.5):
        k = optimal_k(catalog.identical_agents(3), c).k_star
        cr.check(f"identical agents, c = {c}: k* = 1", k == 1, f"k* {k}")
    for m in (2, 3):
        t0 = time.perf_counter()
        res = optimal_k(catalog.optimal_k_example(m), 1 / (m + 1))
        dt = time.perf_counter() - t0
        cr.check(f"m = {m}, c = 1/{m + 1}: k* = {m * m}", res.k_star == m * m, f"k* {res.k_star}")
        if m == 2:
            cr.check("m = 2: k* = k bar", abs(res.k_bar - res.k_star) <= 1e-9, f"k bar {res.k_bar:.12g}")
        cr.check(f"m = {m}: DP runtime < 10 s", dt < 10, f"{dt:.3f} s")
    cr.report(record_property)


def _grid_dominated(ce, x, steps=200):
    """True when some allocation with cell shares on a ``steps`` grid Pareto-dominates ``x``."""
    s = np.linspace(0, 1, steps + 1)
    a, b = np.meshgrid(s, s, indexing="ij")  # agent 1's share of cells 0 and 1
    y1 = np.stack([a * ce.supplies[0], b * ce.supplies[1]], axis=-1)
    y2 = ce.supplies - y1
    v = ce.valuations
    u1 = (y1[..., 0] ** v[0, 0]) * (y1[..., 1] ** v[0, 1])
    u2 = (y2[..., 0] ** v[1, 0]) * (y2[..., 1] ** v[1, 1])
    ux = ce.utilities(x)
    better = (u1 >= ux[0]) & (u2 >= ux[1]) & ((u1 > ux[0] + 1e-9) | (u2 > ux[1] + 1e-9))
    return bool(better.any())


def test_criterion_7_second_welfare(record_property):
    cr = Criterion(7, "second welfare theorem, Cobb-Douglas")
    rng = np.random.default_rng(7)
    worst_sum, failures, dominated = 0.0, 0, 0
    for _ in range(20):
        a1, a2, lam = rng.uniform(0.05, 0.95, 3)
        ce = induce(catalog.cobb_douglas_pair([a1, 1 - a1], [a2, 1 - a2]), Classification([0, 0.5, 1]))
        x = cobb_douglas_weighted_optimum(ce, [lam, 1 - lam])
        dominated += _grid_dominated(ce, x)
        p = cobb_douglas_supporting_prices(ce, x)
        claims = redefine_claims(ce, x, p)
        worst_sum = max(worst_sum, abs(claims.sum() - 1))
        moved = ce.with_claims(claims)
        failures += not verify_equilibrium(moved, Equilibrium(p, x, moved.utilities(x)), 1e-6).passed
    cr.check("20 interior points undominated on a 201x201 share grid", dominated == 0, f"{dominated} dominated")
    cr.check("redefined claims sum to 1 within 1e-10", worst_sum <= 1e-10, f"max err {worst_sum:.2e}")
    cr.check("verify_equilibrium passes at 1e-6 on all 20", failures == 0, f"{failures} failures")
    cr.report(record_property)


def _random_classification(rng, k_max=6):
    k = int(rng.integers(1, k_max + 1))
    return Classification(np.concatenate(([0.0], np.sort(rng.uniform(0.01, 0.99, k - 1)), [1.0])))


def test_criterion_8_property_suites(record_property):
    cr = Criterion(8, "property suites")
    rng = np.random.default_rng(8)

    bad = 0
    for _ in range(200):
        e, pi = random_linear_economy(rng)
        ce = induce(e, pi)
        bad += not verify_equilibrium(ce, solve_linear(ce), 1e-6).passed
    cr.check("certificates on 200 random linear economies at 1e-6", bad == 0, f"{bad} failures")

    worst = -np.inf
    for _ in range(20):
        e, pi = random_linear_economy(rng, n_max=3, k_max=3, sparse=0.3)
        ce = induce(e, pi)
        eg = float(ce.claims @ np.log(solve_linear(ce).utilities))
        worst = max(worst, eisenberg_gale_grid(ce, 10) - eg)
    cr.check("Eisenberg-Gale grid never beats the solver by > 1e-4 on 20 instances", worst <= 1e-4,
             f"max excess {worst:.2e}")

    viol = 0
    for _ in range(100):
        a, b, c = (_random_classification(rng) for _ in range(3))
        dab, dba, dbc, dac = d_omega(a, b, LEB), d_omega(b, a, LEB), d_omega(b, c, LEB), d_omega(a, c, LEB)
        viol += not (d_omega(a, a, LEB) == 0 and dab >= 0 and abs(dab - dba) <= 1e-12 and dac <= dab + dbc + 1e-9)
    cr.check("d_omega pseudo-metric axioms on 100 random triples", viol == 0, f"{viol} violations")

    worst_map = 0.0
    pi = Classification([0, 0.4, 0.8, 1])
    for _ in range(20):
        w1, w2, rho_exp = rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), rng.uniform(0.1, 0.9)
        ev = [PiecewiseMeasure.from_segments([(0, 0.5, 2 * w), (0.5, 1, 2 * (1 - w))]) for w in (w1, w2)]
        extra = sorted({0.4 * rng.uniform(0.05, 0.95), 0.4 + 0.4 * rng.uniform(0.05, 0.95)})
        rho = Classification(sorted({0, 0.4, 0.8, 1, *extra}))
        x_share = rng.uniform(0, 1, 3)
        for make in (Linear, CobbDouglas, lambda m: CES(m, rho_exp)):
            e = Economy(LEB, [Agent(0.5, make(ev[0])), Agent(0.5, make(ev[1]))])
            ce_pi, ce_rho = induce(e, pi), induce(e, rho)
            x = x_share * ce_pi.supplies
            y = map_bundle(pi, rho, x, LEB)
            for i in range(2):
                worst_map = max(worst_map, abs(ce_rho.utility(i, y) - ce_pi.utility(i, x)))
    cr.check("bundle mapping preserves utility at 1e-10 (linear, Cobb-Douglas, CES)", worst_map <= 1e-10,
             f"max err {worst_map:.2e}")

    e = catalog.pareto_one()
    base_pi = Classification([0, 0.5, 1])
    u0 = solve_linear(induce(e, base_pi)).utilities
    devs = []
    for eps in (1e-2, 1e-3, 1e-4):
        rho = random_perturbation(base_pi, eps, seed=1)
        devs.append(_sup(solve_linear(induce(e, rho)).utilities, u0))
    cr.check("shrinking-perturbation ladder decays monotonically", devs[0] > devs[1] > devs[2],
             ", ".join(f"{d:.2e}" for d in devs))
    cr.report(record_property)


def test_criterion_9_online_scenarios(record_property):
    cr = Criterion(9, "svc, Pareto refinement and atom scenarios; repro --all")
    for sid in ("svc_pathology", "appendix_pareto_refinement", "appendix_dirac"):
        rep = repro.run_scenario(sid)
        cr.check(f"scenario {sid}", rep.passed, f"{sum(c.passed for c in rep.checks)}/{len(rep.checks)} checks")
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "conflation", "repro", "--all"], capture_output=True, text=True)
    dt = time.perf_counter() - t0
    cr.check("repro --all exits 0", proc.returncode == 0, f"exit {proc.returncode}")
    cr.check("repro --all under 60 s", dt < 60, f"{dt:.2f} s")
    cr.report(record_property)
