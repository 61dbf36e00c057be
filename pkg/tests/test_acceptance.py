"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion lines.
"""

import time

import numpy as np

from levyldp import (
    ScalePair,
    SimConfig,
    analyze_chain,
    build_perturbed,
    build_prelimit,
    convergence_sweep,
    cumulant,
    cumulant_prime,
    default_family,
    estimate_scgf,
    grid_legendre,
    jump_expansion_residual,
    rate_function,
    simulate_limit,
    simulate_prelimit,
    single_state,
    solve_poisson,
    switching_expansion_defect,
    tilt,
)
from levyldp.cli import main
from levyldp.ldp import LimitGenerator
from tests.test_chain import random_irreducible_chain

U_GRID = np.linspace(-2.0, 2.0, 41)
EPS_SWEEP = [0.2, 0.1, 0.05, 0.025]

# limit cumulant of the two-state reference at lambda = 1, from the closed form
# 0.5 + 0.5*3.8 + 0.1*(e - 1) + 0.1*(1/e - 1)
H_AT_ONE = 2.5086161269630485


def _report(k: int, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {k}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {k}: {detail}"


def test_criterion_1_operator_algebra():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20260810)
    worst_identity = 0.0
    worst_poisson = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 21))
        model = random_irreducible_chain(rng, n)
        analysis = analyze_chain(model)
        Q, Pi, R0 = model.Q, analysis.Pi, analysis.R0
        eye = np.eye(n)
        worst_identity = max(
            worst_identity,
            np.abs(Q @ R0 - (Pi - eye)).max(),
            np.abs(R0 @ Q - (Pi - eye)).max(),
            np.abs(Pi @ R0).max(),
            np.abs(R0 @ Pi).max(),
        )
        psi = rng.standard_normal(n)
        psi -= analysis.pi @ psi
        phi = solve_poisson(analysis, psi)
        scale = max(np.abs(psi).max(), 1e-30)
        worst_poisson = max(worst_poisson, np.abs(Q @ phi - psi).max() / scale)
    elapsed = time.perf_counter() - t0
    ok = worst_identity <= 1e-9 and worst_poisson <= 1e-8 and elapsed < 10.0
    _report(
        1,
        ok,
        f"100 chains: identity defect {worst_identity:.2e} (<=1e-9), "
        f"poisson residual {worst_poisson:.2e} (<=1e-8), {elapsed:.1f}s (<10s)",
    )


def test_criterion_2_switching_expansion_exact(two_state_setup, three_state_setup):
    t0 = time.perf_counter()
    worst = 0.0
    for _, jump, analysis, gen in (two_state_setup, three_state_setup):
        for phi in default_family():
            ptf = build_perturbed(phi, jump, analysis, gen)
            for ratio in (0.5, 1.0, 2.0):
                scales = ScalePair(eps=0.1, delta=0.1 * ratio)
                for u in U_GRID:
                    for x in range(analysis.n):
                        worst = max(
                            worst, switching_expansion_defect(ptf, scales, float(u), x)
                        )
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 5.0
    _report(2, ok, f"max relative defect {worst:.2e} (<=1e-10), {elapsed:.1f}s (<5s)")


def test_criterion_3_generator_convergence(two_state_setup):
    t0 = time.perf_counter()
    _, jump, analysis, gen = two_state_setup
    details = []
    ok = True
    for phi in default_family():
        rep = convergence_sweep(phi, jump, analysis, gen, EPS_SWEEP, u_grid=U_GRID)
        r = rep.residuals()
        good = rep.strictly_decreasing() and r[3] / r[2] <= 0.75 and rep.fitted_order >= 0.8
        ok = ok and good
        details.append(f"{phi.name}: ratio {r[3] / r[2]:.2f}, order {rep.fitted_order:.2f}")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 30.0
    _report(3, ok, "; ".join(details) + f"; {elapsed:.1f}s (<30s)")


def test_criterion_4_jump_expansion_residual(two_state_setup, three_state_setup):
    t0 = time.perf_counter()
    ok = True
    details = []
    for name, (chain, jump, analysis, gen) in (
        ("two_state", two_state_setup),
        ("three_state", three_state_setup),
    ):
        for phi in default_family():
            ptf = build_perturbed(phi, jump, analysis, gen)
            worsts = []
            for eps in EPS_SWEEP:
                scales = ScalePair.equal(eps)
                measure = build_prelimit(jump, scales.delta)
                worsts.append(
                    max(
                        abs(jump_expansion_residual(ptf, measure, scales, float(u), x))
                        for u in U_GRID
                        for x in range(analysis.n)
                    )
                )
            decreasing = all(b < a for a, b in zip(worsts, worsts[1:]))
            ok = ok and decreasing
        details.append(f"{name}: final max residual {worsts[-1]:.3f}")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 30.0
    _report(4, ok, "; ".join(details) + f"; decreasing sweeps; {elapsed:.1f}s (<30s)")


def test_criterion_5_limit_coefficients(two_state_setup):
    _, _, _, gen = two_state_setup
    checks = {
        "a~": (gen.a_tilde, 0.5),
        "a0~": (gen.a0_tilde, 0.0),
        "c~": (gen.c_tilde, 3.0),
        "c0~": (gen.c0_tilde, 0.2),
        "sigma2": (gen.sigma2, 3.8),
    }
    worst = max(abs(got - want) for got, want in checks.values())
    atom_ok = (
        gen.jump_sizes.shape == (2,)
        and np.abs(gen.jump_sizes - [-1.0, 1.0]).max() <= 1e-12
        and np.abs(gen.jump_intensities - [0.1, 0.1]).max() <= 1e-12
    )
    ok = worst <= 1e-12 and atom_ok
    _report(5, ok, f"coefficient defect {worst:.2e} (<=1e-12), atoms {{(-1,0.1),(1,0.1)}}")


def test_criterion_6_limit_cumulant_monte_carlo(two_state_setup):
    t0 = time.perf_counter()
    _, _, _, gen = two_state_setup
    assert abs(cumulant(gen, 1.0) - H_AT_ONE) <= 1e-12
    cfg = SimConfig(scales=ScalePair.equal(1.0), horizon=1.0, paths=100_000, seed=60_2026)
    xi = simulate_limit(gen, cfg)
    ok = True
    details = []
    for est in estimate_scgf(xi, cfg.scales, [-1.0, -0.5, 0.5, 1.0]):
        target = cumulant(gen, est.lam)
        pulls = abs(est.value - target) / est.std_error
        ok = ok and pulls <= 3.0
        details.append(f"lam={est.lam:+.1f}: {pulls:.2f} SE")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 60.0
    _report(6, ok, "; ".join(details) + f"; {elapsed:.1f}s (<60s)")


def test_criterion_7_prelimit_moments():
    t0 = time.perf_counter()
    a1, a, c = 0.8, 0.3, 1.5
    chain, jump = single_state(a1=a1, a=a, c=c, gamma0=((0.5, 0.3),))
    analysis = analyze_chain(chain)
    ok = True
    details = []
    for eps in (0.3, 0.2):
        cfg = SimConfig(
            scales=ScalePair.equal(eps), horizon=1.0, paths=100_000, seed=70_2026, x0=0
        )
        measure = build_prelimit(jump, eps)
        xi = simulate_prelimit(chain, analysis, measure, cfg).endpoints

        mean_exact = cfg.horizon * (eps * a1 + eps**2 * a) / eps**2
        var_exact = cfg.horizon * eps**2 * c / eps
        se_mean = xi.std(ddof=1) / np.sqrt(xi.size)
        pull_mean = abs(xi.mean() - mean_exact) / se_mean
        s2 = xi.var(ddof=1)
        m4 = ((xi - xi.mean()) ** 4).mean()
        se_var = np.sqrt(max(m4 - s2**2, 0.0) / xi.size)
        pull_var = abs(s2 - var_exact) / se_var
        ok = ok and pull_mean <= 3.0 and pull_var <= 3.0
        details.append(f"eps={eps}: mean {pull_mean:.2f} SE, var {pull_var:.2f} SE")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 120.0
    _report(7, ok, "; ".join(details) + f"; {elapsed:.1f}s (<120s)")


def test_criterion_8_legendre_machinery(two_state_setup):
    t0 = time.perf_counter()
    _, _, _, gen = two_state_setup

    value_at_mean, _ = rate_function(gen, gen.a_tilde)
    mean_ok = abs(value_at_mean) <= 1e-10

    grid = np.linspace(cumulant_prime(gen, -1.0), cumulant_prime(gen, 1.0), 400)
    duality_err = max(
        abs(grid_legendre(gen, float(lam), grid) - cumulant(gen, float(lam)))
        for lam in np.linspace(-1.0, 1.0, 9)
    )

    gauss = LimitGenerator(
        drift=0.5,
        sigma2=3.8,
        jump_sizes=np.empty(0),
        jump_intensities=np.empty(0),
        a_tilde=0.5,
        a0_tilde=0.0,
        c_tilde=3.8,
        c0_tilde=0.0,
    )
    gauss_value, _ = rate_function(gauss, 2.5)
    gauss_err = abs(gauss_value - (2.5 - 0.5) ** 2 / (2 * 3.8))

    tilt_err = max(
        abs(tilt(gen, float(lam)).mean - cumulant_prime(gen, float(lam)))
        for lam in np.arange(-2.0, 2.0 + 1e-12, 0.1)
    )
    elapsed = time.perf_counter() - t0
    ok = (
        mean_ok
        and duality_err <= 1e-6
        and gauss_err <= 1e-9
        and tilt_err <= 1e-12
        and elapsed < 5.0
    )
    _report(
        8,
        ok,
        f"I(a~) {abs(value_at_mean):.1e} (<=1e-10), duality {duality_err:.1e} (<=1e-6), "
        f"gaussian {gauss_err:.1e} (<=1e-9), tilt {tilt_err:.1e} (<=1e-12), {elapsed:.1f}s (<5s)",
    )


def test_criterion_9_byte_determinism(tmp_path):
    cfg_path = "configs/two_state.ini"
    sim_outs = [tmp_path / f"sim{i}.csv" for i in range(3)]
    sim_args = ["simulate", "--config", cfg_path, "--paths", "300", "--eps", "0.3", "--seed", "9"]
    assert main(sim_args + ["--batches", "1", "--out", str(sim_outs[0])]) == 0
    assert main(sim_args + ["--batches", "1", "--out", str(sim_outs[1])]) == 0
    assert main(sim_args + ["--batches", "7", "--out", str(sim_outs[2])]) == 0

    scgf_outs = [tmp_path / f"scgf{i}.csv" for i in range(3)]
    scgf_args = [
        "scgf",
        "--config",
        cfg_path,
        "--paths",
        "300",
        "--eps",
        "0.3",
        "--seed",
        "9",
        "--lambda-grid",
        "-0.5 0.5",
    ]
    assert main(scgf_args + ["--batches", "1", "--out", str(scgf_outs[0])]) == 0
    assert main(scgf_args + ["--batches", "1", "--out", str(scgf_outs[1])]) == 0
    assert main(scgf_args + ["--batches", "5", "--out", str(scgf_outs[2])]) == 0

    sim_blobs = [p.read_bytes() for p in sim_outs]
    scgf_blobs = [p.read_bytes() for p in scgf_outs]
    ok = sim_blobs[0] == sim_blobs[1] == sim_blobs[2] and scgf_blobs[0] == scgf_blobs[1] == scgf_blobs[2]
    _report(9, ok, "simulate and scgf byte-identical across reruns and batch counts")
