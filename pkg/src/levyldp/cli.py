"""Command-line interface: validate/analyze a model, run sweeps, simulate, tabulate.

Exit codes: 0 success, 1 validation failure (bad config, failed structural
condition, bad flag values), 2 property failure (non-monotone convergence
residuals), 3 simulation budget exceeded.

Validation conditions are reported under short codes: C1 (ergodic switching
chain), LA3 (stationary balance of a1), C3/C4 (integrability, structural for
finite atom lists), VAR (positive averaged variance).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import exp_gen, ldp, simulate
from .chain import analyze_chain
from .config import ModelConfig, load_config, parse_delta_rule
from .errors import (
    BudgetExceeded,
    ConfigError,
    DegenerateSample,
    DomainError,
    NegativeIntensity,
    NoConvergence,
    NonPositiveVariance,
    OverflowGuard,
    SingularSystem,
    SolvabilityViolated,
)
from .jump_model import build_prelimit, validate_conditions
from .limit_gen import (
    build_limit_generator,
    constant_function,
    linear_function,
    sin_function,
    tanh_function,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PROPERTY = 2
EXIT_BUDGET = 3

PHI_CHOICES = {
    "tanh": tanh_function,
    "sin": sin_function,
    "linear": linear_function,
    "constant": constant_function,
}


def _fmt(x: float) -> str:
    # shortest decimal form that round-trips the double exactly
    return repr(float(x))


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _floats_arg(text: str) -> list[float]:
    items = text.replace(",", " ").split()
    return [float(p) for p in items]


def _grid_arg(text: str) -> np.ndarray:
    if ":" in text:
        lo, hi, step = (float(p) for p in text.split(":"))
        n = round((hi - lo) / step)
        if abs((hi - lo) / step - n) > 1e-9:
            raise ConfigError(f"step {step:g} does not divide [{lo:g}, {hi:g}]")
        return np.linspace(lo, hi, n + 1)
    return np.array(_floats_arg(text))


def _seed(cfg: ModelConfig, args) -> int:
    return cfg.seed if args.seed is None else args.seed


def _analysis_and_generator(cfg: ModelConfig):
    chain = cfg.chain_model()
    jump = cfg.jump_model()
    analysis = analyze_chain(chain)
    report = validate_conditions(jump, analysis)
    return chain, jump, analysis, report


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    try:
        chain, jump, analysis, report = _analysis_and_generator(cfg)
    except SingularSystem as exc:
        print(f"FAIL C1: {exc}")
        return EXIT_VALIDATION

    n = analysis.n
    lines = ["condition checks"]
    lines.append("pi = " + " ".join(_fmt(p) for p in analysis.pi))
    lines.append("R0 =")
    for row in analysis.R0:
        lines.append("    " + " ".join(_fmt(v) for v in row))
    identity = np.abs(chain.Q @ analysis.R0 - (analysis.Pi - np.eye(n))).max()
    annihilation = np.abs(analysis.Pi @ analysis.R0).max()
    lines.append(f"max |Q R0 - (Pi - I)| = {identity:.3e}")
    lines.append(f"max |Pi R0| = {annihilation:.3e}")
    lines.append("C1 ok: switching chain is irreducible")
    lines.extend(report.lines())
    print("\n".join(lines))

    if not report.balance_ok:
        print(f"FAIL LA3: balance residual {report.balance_residual:.3e} > 1e-10")
        return EXIT_VALIDATION
    if not report.sigma2_positive:
        print(f"FAIL VAR: sigma^2 = {report.sigma2:.6g} is not positive")
        return EXIT_VALIDATION
    print("all conditions passed")
    return EXIT_OK


def cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    chain, jump, analysis, report = _analysis_and_generator(cfg)
    if not report.passed:
        print("model fails validation; run `validate` for details")
        return EXIT_VALIDATION
    gen = build_limit_generator(jump, analysis)
    lines = []
    lines.append("pi = " + " ".join(_fmt(p) for p in analysis.pi))
    lines.append("R0 =")
    for row in analysis.R0:
        lines.append("    " + " ".join(_fmt(v) for v in row))
    lines.append(f"a_tilde = {_fmt(gen.a_tilde)}")
    lines.append(f"a0_tilde = {_fmt(gen.a0_tilde)}")
    lines.append(f"c_tilde = {_fmt(gen.c_tilde)}")
    lines.append(f"c0_tilde = {_fmt(gen.c0_tilde)}")
    lines.append(f"drift = {_fmt(gen.drift)}")
    lines.append(f"sigma2 = {_fmt(gen.sigma2)}")
    atoms = " ".join(
        f"{_fmt(v)}:{_fmt(g)}" for v, g in zip(gen.jump_sizes, gen.jump_intensities)
    )
    lines.append(f"limit atoms = {atoms if atoms else '(none)'}")
    lines.append(f"mean rate = {_fmt(gen.mean_rate)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_convergence(args) -> int:
    cfg = load_config(args.config)
    chain, jump, analysis, report = _analysis_and_generator(cfg)
    if not report.passed:
        print("model fails validation; run `validate` for details")
        return EXIT_VALIDATION
    gen = build_limit_generator(jump, analysis)
    eps_list = _floats_arg(args.eps_list) if args.eps_list else list(cfg.eps_list)
    rule = parse_delta_rule(args.delta_rule) if args.delta_rule else cfg.rule()
    phi = PHI_CHOICES[args.phi]()
    rep = exp_gen.convergence_sweep(
        phi, jump, analysis, gen, eps_list, delta_rule=rule, u_grid=cfg.u_grid()
    )
    _emit(rep.to_csv(), args.out)
    if not rep.strictly_decreasing():
        print("residuals are not strictly decreasing", file=sys.stderr)
        return EXIT_PROPERTY
    return EXIT_OK


def _sim_config(cfg: ModelConfig, args) -> simulate.SimConfig:
    eps = args.eps if args.eps is not None else cfg.eps_list[0]
    delta = (parse_delta_rule(args.delta_rule) if args.delta_rule else cfg.rule())(eps)
    if args.x0 is None or args.x0 == "stationary":
        x0 = None
    else:
        x0 = cfg.state_index(args.x0)
    return simulate.SimConfig(
        scales=exp_gen.ScalePair(eps=eps, delta=delta),
        horizon=args.t,
        paths=args.paths,
        seed=_seed(cfg, args),
        x0=x0,
        u0=args.u0,
        event_budget=args.budget,
    )


def _batched_prelimit(chain, analysis, measure, sim_cfg, batches: int) -> np.ndarray:
    if batches < 1:
        raise ConfigError("--batches must be >= 1")
    bounds = np.linspace(0, sim_cfg.paths, batches + 1).astype(int)
    parts = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi > lo:
            sample = simulate.simulate_prelimit(
                chain, analysis, measure, sim_cfg, path_offset=int(lo), path_count=int(hi - lo)
            )
            parts.append(sample.endpoints)
    return np.concatenate(parts)


def _batched_limit(gen, sim_cfg, batches: int) -> np.ndarray:
    if batches < 1:
        raise ConfigError("--batches must be >= 1")
    bounds = np.linspace(0, sim_cfg.paths, batches + 1).astype(int)
    parts = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi > lo:
            parts.append(
                simulate.simulate_limit(gen, sim_cfg, path_offset=int(lo), path_count=int(hi - lo))
            )
    return np.concatenate(parts)


def _endpoints_for(cfg: ModelConfig, args) -> np.ndarray:
    chain, jump, analysis, report = _analysis_and_generator(cfg)
    sim_cfg = _sim_config(cfg, args)
    if getattr(args, "limit", False):
        if not report.passed:
            print("model fails validation; run `validate` for details")
            raise ConfigError("limit-process simulation requires a valid model")
        gen = build_limit_generator(jump, analysis)
        return _batched_limit(gen, sim_cfg, args.batches)
    measure = build_prelimit(jump, sim_cfg.scales.delta)
    return _batched_prelimit(chain, analysis, measure, sim_cfg, args.batches)


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    endpoints = _endpoints_for(cfg, args)
    lines = ["path_index,endpoint"]
    lines.extend(f"{i},{_fmt(v)}" for i, v in enumerate(endpoints))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_scgf(args) -> int:
    cfg = load_config(args.config)
    endpoints = _endpoints_for(cfg, args)
    lam_grid = _grid_arg(args.lambda_grid) if args.lambda_grid else cfg.lambda_grid()
    eps = args.eps if args.eps is not None else cfg.eps_list[0]
    delta = (parse_delta_rule(args.delta_rule) if args.delta_rule else cfg.rule())(eps)
    estimates = simulate.estimate_scgf(
        endpoints, exp_gen.ScalePair(eps=eps, delta=delta), lam_grid
    )
    lines = ["lambda,scgf,std_error,n_effective"]
    lines.extend(
        f"{_fmt(e.lam)},{_fmt(e.value)},{_fmt(e.std_error)},{_fmt(e.n_effective)}"
        for e in estimates
    )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_rate(args) -> int:
    cfg = load_config(args.config)
    chain, jump, analysis, report = _analysis_and_generator(cfg)
    if not report.passed:
        print("model fails validation; run `validate` for details")
        return EXIT_VALIDATION
    gen = build_limit_generator(jump, analysis)
    xs = _grid_arg(args.x_grid)
    lines = ["x,rate,lambda_star"]
    for x in xs:
        value, lam = ldp.rate_function(gen, float(x))
        lines.append(f"{_fmt(float(x))},{_fmt(value)},{_fmt(lam)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levyldp",
        description="Rate-function and generator-convergence toolkit for "
        "Markov-switched jump evolutions.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="model configuration file")
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument("--out", default=None, help="write output to this file instead of stdout")

    sim_common = argparse.ArgumentParser(add_help=False)
    sim_common.add_argument("--paths", type=int, default=1000)
    sim_common.add_argument("--t", type=float, default=1.0, help="time horizon")
    sim_common.add_argument("--eps", type=float, default=None, help="scale (default: first eps_list entry)")
    sim_common.add_argument("--delta-rule", default=None, help="'equal' or 'ratio:<r>'")
    sim_common.add_argument("--x0", default=None, help="initial state label or 'stationary'")
    sim_common.add_argument("--u0", type=float, default=0.0)
    sim_common.add_argument("--batches", type=int, default=1, help="process paths in this many batches")
    sim_common.add_argument("--budget", type=float, default=1e8, help="event budget per path")
    sim_common.add_argument("--limit", action="store_true", help="simulate the limit process instead")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common]).set_defaults(func=cmd_validate)
    sub.add_parser("analyze", parents=[common]).set_defaults(func=cmd_analyze)

    p = sub.add_parser("convergence", parents=[common])
    p.add_argument("--eps-list", default=None, help="override eps sweep, e.g. '0.2 0.1 0.05'")
    p.add_argument("--delta-rule", default=None)
    p.add_argument("--phi", choices=sorted(PHI_CHOICES), default="tanh")
    p.set_defaults(func=cmd_convergence)

    sub.add_parser("simulate", parents=[common, sim_common]).set_defaults(func=cmd_simulate)

    p = sub.add_parser("scgf", parents=[common, sim_common])
    p.add_argument("--lambda-grid", default=None, help="values or lo:hi:step")
    p.set_defaults(func=cmd_scgf)

    p = sub.add_parser("rate", parents=[common])
    p.add_argument("--x-grid", required=True, help="values or lo:hi:step")
    p.set_defaults(func=cmd_rate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (
        ConfigError,
        SingularSystem,
        SolvabilityViolated,
        NegativeIntensity,
        NonPositiveVariance,
        DomainError,
        OverflowGuard,
        NoConvergence,
        DegenerateSample,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
