"""Exact pre-limit exponential generators on perturbed test functions.

The scaled two-component generator splits into a switching part and a jump
part.  Acting on the perturbed function

    phi_eps(u, x) = phi(u) + eps ln(1 + delta phi1(u, x) + delta^2 phi2(u, x))

the exp(phi(u)/eps) factor cancels analytically, so both parts reduce to
finite sums that can be evaluated exactly and compared against their
asymptotic expansions and against the averaged limit generator.  The
correctors solve a two-level Poisson hierarchy in the switching generator:
phi1 kills the 1/eps drift term, phi2 absorbs the state-dependent remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .chain import ChainAnalysis, solve_poisson
from .errors import DomainError, OverflowGuard
from .jump_model import JumpModel, PrelimitMeasure, build_prelimit
from .limit_gen import (
    LimitGenerator,
    TestFunction,
    apply_limit_generator,
    apply_state_generator,
)

DEFAULT_U_GRID = np.linspace(-2.0, 2.0, 41)
LOG_ARGUMENT_FLOOR = 0.5
EXP_LIMIT = 700.0


@dataclass(frozen=True)
class ScalePair:
    """Time/jump scale pair (eps, delta); the scheme requires delta/eps near 1."""

    eps: float
    delta: float

    def __post_init__(self):
        if self.eps <= 0.0 or self.delta <= 0.0:
            raise ValueError("eps and delta must be positive")
        r = self.ratio
        if not 0.5 <= r <= 2.0:
            raise ValueError(f"delta/eps = {r:.4g} outside the admissible band [0.5, 2]")

    @property
    def ratio(self) -> float:
        return self.delta / self.eps

    @classmethod
    def equal(cls, eps: float) -> "ScalePair":
        return cls(eps=eps, delta=eps)


DeltaRule = Callable[[float], float]


def equal_rule(eps: float) -> float:
    return eps


def ratio_rule(r: float) -> DeltaRule:
    def rule(eps: float) -> float:
        return r * eps

    return rule


@dataclass(frozen=True)
class PerturbedTestFunction:
    """Base test function plus the correctors phi1, phi2 of the perturbation hierarchy.

    phi1(u, .) = (R0 a1) phi'(u), and phi2(u, .) = -R0 psi_u where psi_u is the
    state-dependent defect between the limit generator and the per-state one.
    Both depend on u only through phi'(u).
    """

    phi: TestFunction
    model: JumpModel
    analysis: ChainAnalysis
    gen: LimitGenerator
    r0a1: np.ndarray

    @property
    def n(self) -> int:
        return self.analysis.n

    def phi1_vec(self, u: float) -> np.ndarray:
        return self.r0a1 * float(self.phi.d1(u))

    def psi_vec(self, u: float) -> np.ndarray:
        p = float(self.phi.d1(u))
        h0 = apply_limit_generator(self.gen, self.phi, u)
        hx = np.array(
            [apply_state_generator(self.model, x, self.phi, u) for x in range(self.n)]
        )
        return h0 - hx - self.model.a1 * self.r0a1 * p * p

    def phi2_vec(self, u: float) -> np.ndarray:
        return solve_poisson(self.analysis, self.psi_vec(u))

    def w_shift_vec(self, u: float, delta: float) -> np.ndarray:
        """W(u, .) - 1 = delta phi1 + delta^2 phi2, per state."""
        return delta * self.phi1_vec(u) + delta * delta * self.phi2_vec(u)

    def log_w(self, u: float, x: int, delta: float) -> float:
        dw = float(self.w_shift_vec(u, delta)[x])
        if dw <= -1.0:
            raise DomainError(f"log argument {1.0 + dw:.4g} <= 0 at u={u:.6g}, state {x}")
        return math.log1p(dw)

    def value(self, u: float, x: int, scales: ScalePair) -> float:
        return float(self.phi.eval(u)) + scales.eps * self.log_w(u, x, scales.delta)

    def min_log_argument(self, delta: float, u_grid: np.ndarray) -> float:
        return min(
            1.0 + float(self.w_shift_vec(float(u), delta).min()) for u in np.asarray(u_grid)
        )


def build_perturbed(
    phi: TestFunction,
    model: JumpModel,
    analysis: ChainAnalysis,
    gen: LimitGenerator,
) -> PerturbedTestFunction:
    """Assemble the correctors for phi.

    Both corrector levels go through solve_poisson, so an unbalanced a1 (or an
    inconsistent limit generator) surfaces as SolvabilityViolated.
    """
    r0a1 = solve_poisson(analysis, -model.a1)  # = R0 a1, balance check included
    return PerturbedTestFunction(phi=phi, model=model, analysis=analysis, gen=gen, r0a1=r0a1)


def switching_part(
    ptf: PerturbedTestFunction, scales: ScalePair, u: float, x: int
) -> float:
    """Exact switching-part generator: eps^-2 sum_y Q[x, y] (W(u, y)/W(u, x) - 1)."""
    w = 1.0 + ptf.w_shift_vec(u, scales.delta)
    if (w <= 0.0).any():
        raise DomainError(f"log argument min {w.min():.4g} <= 0 at u={u:.6g}")
    Q = ptf.analysis.model.Q
    return float(Q[x] @ (w / w[x] - 1.0)) / (scales.eps * scales.eps)


def jump_part(
    ptf: PerturbedTestFunction,
    measure: PrelimitMeasure,
    scales: ScalePair,
    u: float,
    x: int,
) -> float:
    """Exact jump-part generator at (u, x).

    An atom of size v contributes
        intensity * expm1((phi(u + eps v) - phi(u))/eps + ln W(u + eps v, x) - ln W(u, x))
    and the sum carries the eps^-2 prefactor.  Assembling the exponent in log
    space keeps small-jump cancellation benign and avoids exp(phi/eps) overflow.
    """
    if abs(measure.delta - scales.delta) > 1e-12 * max(1.0, scales.delta):
        raise ValueError(
            f"measure built at delta={measure.delta:.6g} but scales carry {scales.delta:.6g}"
        )
    eps = scales.eps
    log_w_base = ptf.log_w(u, x, scales.delta)
    base = float(ptf.phi.eval(u))

    sizes = measure.sizes[x]
    intens = measure.intensities[x]
    total = 0.0
    for v, g in zip(sizes, intens):
        us = u + eps * v
        z = (float(ptf.phi.eval(us)) - base) / eps
        exponent = z + ptf.log_w(us, x, scales.delta) - log_w_base
        if abs(exponent) > EXP_LIMIT:
            raise OverflowGuard(f"exponent {exponent:.4g} exceeds the safe range at u={u:.6g}")
        total += g * math.expm1(exponent)
    return total / (eps * eps)


def prelimit_generator(
    ptf: PerturbedTestFunction,
    measure: PrelimitMeasure,
    scales: ScalePair,
    u: float,
    x: int,
) -> float:
    """Full pre-limit exponential generator: switching part plus jump part."""
    return switching_part(ptf, scales, u, x) + jump_part(ptf, measure, scales, u, x)


def switching_expansion_defect(
    ptf: PerturbedTestFunction, scales: ScalePair, u: float, x: int
) -> float:
    """Defect of the exact rational-algebra expansion of the switching part.

    The expansion
        delta/eps^2 Q phi1 + delta^2/eps^2 Q phi2 - delta^2/eps^2 phi1 Q phi1 + theta
    with the closed-form remainder
        theta = delta^3/eps^2 [(phi1^2 + delta phi1 phi2 - phi2) / W] (Q phi1 + delta Q phi2)
              - delta^3/eps^2 phi1 Q phi2
    is an identity, so the defect is pure floating-point noise.  Returned value
    is |exact - expansion| / max(1, |exact|).
    """
    eps = scales.eps
    delta = scales.delta
    lhs = switching_part(ptf, scales, u, x)

    Q = ptf.analysis.model.Q
    p1 = ptf.phi1_vec(u)
    p2 = ptf.phi2_vec(u)
    qp1 = float(Q[x] @ p1)
    qp2 = float(Q[x] @ p2)
    w = 1.0 + delta * p1[x] + delta * delta * p2[x]
    inv_eps2 = 1.0 / (eps * eps)
    theta = (
        delta**3 * inv_eps2 * ((p1[x] ** 2 + delta * p1[x] * p2[x] - p2[x]) / w)
        * (qp1 + delta * qp2)
        - delta**3 * inv_eps2 * p1[x] * qp2
    )
    rhs = (
        delta * inv_eps2 * qp1
        + delta * delta * inv_eps2 * qp2
        - delta * delta * inv_eps2 * p1[x] * qp1
        + theta
    )
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def jump_expansion_residual(
    ptf: PerturbedTestFunction,
    measure: PrelimitMeasure,
    scales: ScalePair,
    u: float,
    x: int,
) -> float:
    """Signed residual of the jump part against its first-order expansion:

        jump_part - [per-state generator + eps^-1 a1(x) phi'(u)].

    Vanishes as eps -> 0 with delta = eps; the sweep over eps is the check.
    """
    expansion = apply_state_generator(ptf.model, x, ptf.phi, u) + ptf.model.a1[x] * float(
        ptf.phi.d1(u)
    ) / scales.eps
    return jump_part(ptf, measure, scales, u, x) - expansion


@dataclass(frozen=True)
class ConvergenceRow:
    eps: float
    delta: float
    max_residual: float
    argmax_u: float
    argmax_state: int


@dataclass(frozen=True)
class ConvergenceReport:
    """Residual of the full pre-limit generator against the limit one, per scale."""

    rows: tuple[ConvergenceRow, ...]
    fitted_order: float

    def residuals(self) -> np.ndarray:
        return np.array([r.max_residual for r in self.rows])

    def strictly_decreasing(self, floor: float = 1e-12) -> bool:
        """True when residuals strictly decrease; values below `floor` count as zero."""
        r = self.residuals()
        for prev, cur in zip(r[:-1], r[1:]):
            if prev <= floor and cur <= floor:
                continue
            if cur >= prev:
                return False
        return True

    def to_csv(self) -> str:
        lines = ["eps,delta,max_residual,argmax_u,argmax_state,fitted_order"]
        last = len(self.rows) - 1
        for i, row in enumerate(self.rows):
            order = (
                repr(float(self.fitted_order))
                if i == last and math.isfinite(self.fitted_order)
                else ""
            )
            lines.append(
                f"{float(row.eps)!r},{float(row.delta)!r},{float(row.max_residual)!r},"
                f"{float(row.argmax_u)!r},{row.argmax_state},{order}"
            )
        return "\n".join(lines) + "\n"


def fit_order(eps: Sequence[float], residuals: Sequence[float]) -> float:
    """Least-squares slope of ln residual against ln eps (nan when degenerate)."""
    eps = np.asarray(eps, dtype=float)
    res = np.asarray(residuals, dtype=float)
    keep = res > 0.0
    if keep.sum() < 2:
        return float("nan")
    slope = np.polyfit(np.log(eps[keep]), np.log(res[keep]), 1)[0]
    return float(slope)


def convergence_sweep(
    phi: TestFunction,
    model: JumpModel,
    analysis: ChainAnalysis,
    gen: LimitGenerator,
    eps_list: Sequence[float],
    delta_rule: DeltaRule | None = None,
    u_grid: np.ndarray | None = None,
) -> ConvergenceReport:
    """Max-over-grid residual |switching + jump - limit| for each scale in eps_list.

    eps_list must be strictly decreasing.  A scale pair whose perturbation
    logarithm dips below LOG_ARGUMENT_FLOOR anywhere on the grid is rejected
    with DomainError rather than clamped.
    """
    eps_arr = list(eps_list)
    if any(b >= a for a, b in zip(eps_arr[:-1], eps_arr[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    rule = delta_rule or equal_rule
    grid = DEFAULT_U_GRID if u_grid is None else np.asarray(u_grid, dtype=float)

    ptf = build_perturbed(phi, model, analysis, gen)
    rows = []
    for eps in eps_arr:
        scales = ScalePair(eps=eps, delta=rule(eps))
        floor = ptf.min_log_argument(scales.delta, grid)
        if floor < LOG_ARGUMENT_FLOOR:
            raise DomainError(
                f"scale pair (eps={eps:.4g}, delta={scales.delta:.4g}) rejected: "
                f"min log argument {floor:.4g} < {LOG_ARGUMENT_FLOOR}"
            )
        measure = build_prelimit(model, scales.delta)
        worst = -1.0
        arg_u = float(grid[0])
        arg_x = 0
        for u in grid:
            target = apply_limit_generator(gen, phi, float(u))
            for x in range(analysis.n):
                r = abs(prelimit_generator(ptf, measure, scales, float(u), x) - target)
                if r > worst:
                    worst = r
                    arg_u = float(u)
                    arg_x = x
        rows.append(
            ConvergenceRow(
                eps=eps, delta=scales.delta, max_residual=worst, argmax_u=arg_u, argmax_state=arg_x
            )
        )
    order = fit_order([r.eps for r in rows], [r.max_residual for r in rows])
    return ConvergenceReport(rows=tuple(rows), fitted_order=order)
