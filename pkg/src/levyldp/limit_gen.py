"""Averaged limit generator: coefficients, exponential generator, cumulant.

Averaging the per-state jump data against the stationary distribution yields
the triple (drift, sigma^2, residual measure) of the limit jump process.  Its
exponential generator acting on a test function phi at u is

    b phi'(u) + sigma^2 phi'(u)^2 / 2 + sum_k (exp(v_k phi'(u)) - 1) g_k,

with b = a~ - a0~, and reduces to the cumulant H(lambda) on linear phi.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .chain import ChainAnalysis
from .errors import NonPositiveVariance
from .jump_model import JumpModel, sigma_squared

MERGE_TOL = 1e-12


@dataclass(frozen=True)
class TestFunction:
    """Scalar test function with analytic derivatives up to third order.

    `bounded` records whether the function (and its derivatives) are bounded,
    i.e. whether it sits inside the class the limit theory literally assumes;
    unbounded members such as the linear function are still usable because all
    jump integrals here are finite sums.
    """

    name: str
    f: Callable[[float], float]
    df: Callable[[float], float]
    d2f: Callable[[float], float]
    d3f: Callable[[float], float]
    bounded: bool = True

    def eval(self, u):
        return self.f(u)

    def d1(self, u):
        return self.df(u)

    def d2(self, u):
        return self.d2f(u)

    def d3(self, u):
        return self.d3f(u)


def tanh_function(alpha: float = 1.0, beta: float = 1.0) -> TestFunction:
    def f(u):
        return alpha * np.tanh(beta * u)

    def df(u):
        t = np.tanh(beta * u)
        return alpha * beta * (1.0 - t * t)

    def d2f(u):
        t = np.tanh(beta * u)
        return -2.0 * alpha * beta**2 * t * (1.0 - t * t)

    def d3f(u):
        t = np.tanh(beta * u)
        return -2.0 * alpha * beta**3 * (1.0 - t * t) * (1.0 - 3.0 * t * t)

    return TestFunction(f"tanh(a={alpha:g},b={beta:g})", f, df, d2f, d3f, bounded=True)


def sin_function(alpha: float = 1.0, beta: float = 1.0, phase: float = 0.0) -> TestFunction:
    def f(u):
        return alpha * np.sin(beta * u + phase)

    def df(u):
        return alpha * beta * np.cos(beta * u + phase)

    def d2f(u):
        return -alpha * beta**2 * np.sin(beta * u + phase)

    def d3f(u):
        return -alpha * beta**3 * np.cos(beta * u + phase)

    return TestFunction(f"sin(a={alpha:g},b={beta:g},p={phase:g})", f, df, d2f, d3f, bounded=True)


def linear_function(slope: float = 1.0) -> TestFunction:
    return TestFunction(
        f"linear(l={slope:g})",
        lambda u: slope * u,
        lambda u: slope * np.ones_like(np.asarray(u, dtype=float)) if np.ndim(u) else slope,
        lambda u: 0.0 * np.asarray(u, dtype=float) if np.ndim(u) else 0.0,
        lambda u: 0.0 * np.asarray(u, dtype=float) if np.ndim(u) else 0.0,
        bounded=False,
    )


def constant_function(value: float = 0.0) -> TestFunction:
    zero = lambda u: 0.0 * np.asarray(u, dtype=float) if np.ndim(u) else 0.0
    return TestFunction(
        f"const({value:g})", lambda u: value + zero(u), zero, zero, zero, bounded=True
    )


def default_family() -> tuple[TestFunction, ...]:
    """Test functions used by the shipped sweeps: bounded tanh and sin, plus linear."""
    return (tanh_function(), sin_function(), linear_function(1.0))


@dataclass(frozen=True)
class LimitGenerator:
    """Averaged triple (drift, sigma^2, residual measure) plus the raw averages."""

    drift: float                 # a~ - a0~
    sigma2: float
    jump_sizes: np.ndarray       # merged residual atom sizes, ascending
    jump_intensities: np.ndarray
    a_tilde: float
    a0_tilde: float
    c_tilde: float
    c0_tilde: float

    @property
    def mean_rate(self) -> float:
        """Mean displacement per unit time: drift plus residual first moment."""
        return self.drift + float((self.jump_sizes * self.jump_intensities).sum())

    @property
    def total_intensity(self) -> float:
        return float(self.jump_intensities.sum())


def _merge_atoms(sizes: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort atoms by size and merge entries whose sizes agree within MERGE_TOL."""
    if sizes.size == 0:
        return np.empty(0), np.empty(0)
    order = np.argsort(sizes, kind="stable")
    sizes = sizes[order]
    weights = weights[order]
    out_sizes = [sizes[0]]
    out_weights = [weights[0]]
    for v, w in zip(sizes[1:], weights[1:]):
        if abs(v - out_sizes[-1]) <= MERGE_TOL:
            out_weights[-1] += w
        else:
            out_sizes.append(v)
            out_weights.append(w)
    return np.array(out_sizes), np.array(out_weights)


def build_limit_generator(model: JumpModel, analysis: ChainAnalysis) -> LimitGenerator:
    """Average the per-state jump data against pi and assemble the limit triple."""
    pi = analysis.pi
    a_tilde = float(pi @ model.a)
    a0_tilde = float(pi @ model.a0)
    c_tilde = float(pi @ model.c)
    c0_tilde = float(pi @ model.c0)
    s2 = sigma_squared(model, analysis)
    if s2 <= 0.0:
        raise NonPositiveVariance(f"sigma^2 = {s2:.6g} must be strictly positive")

    all_sizes = []
    all_weights = []
    for x in range(model.n):
        atoms = model.gamma0[x]
        if atoms.size:
            all_sizes.append(atoms[:, 0])
            all_weights.append(pi[x] * atoms[:, 1])
    if all_sizes:
        sizes, weights = _merge_atoms(np.concatenate(all_sizes), np.concatenate(all_weights))
    else:
        sizes, weights = np.empty(0), np.empty(0)
    sizes.setflags(write=False)
    weights.setflags(write=False)
    return LimitGenerator(
        drift=a_tilde - a0_tilde,
        sigma2=s2,
        jump_sizes=sizes,
        jump_intensities=weights,
        a_tilde=a_tilde,
        a0_tilde=a0_tilde,
        c_tilde=c_tilde,
        c0_tilde=c0_tilde,
    )


def apply_limit_generator(gen: LimitGenerator, phi: TestFunction, u: float) -> float:
    """Limit exponential generator on phi at u; depends on u only through phi'(u)."""
    p = float(phi.d1(u))
    jump = float((gen.jump_intensities * np.expm1(gen.jump_sizes * p)).sum())
    return gen.drift * p + 0.5 * gen.sigma2 * p * p + jump


def apply_state_generator(model: JumpModel, x: int, phi: TestFunction, u: float) -> float:
    """Per-state exponential generator: the limit form with state-x coefficients."""
    p = float(phi.d1(u))
    a0 = model.a0
    c0 = model.c0
    atoms = model.gamma0[x]
    jump = float((atoms[:, 1] * np.expm1(atoms[:, 0] * p)).sum()) if atoms.size else 0.0
    return (model.a[x] - a0[x]) * p + 0.5 * (model.c[x] - c0[x]) * p * p + jump


def cumulant(gen: LimitGenerator, lam: float) -> float:
    """H(lambda): the generator evaluated on the linear function with slope lambda."""
    jump = float((gen.jump_intensities * np.expm1(gen.jump_sizes * lam)).sum())
    return gen.drift * lam + 0.5 * gen.sigma2 * lam * lam + jump


def cumulant_prime(gen: LimitGenerator, lam: float) -> float:
    """H'(lambda) = drift + sigma^2 lambda + sum v e^(lambda v) g."""
    jump = float(
        (gen.jump_intensities * gen.jump_sizes * np.exp(gen.jump_sizes * lam)).sum()
    )
    return gen.drift + gen.sigma2 * lam + jump


def cumulant_curvature(gen: LimitGenerator, lam: float) -> float:
    """H''(lambda) = sigma^2 + sum v^2 e^(lambda v) g; strictly positive when sigma^2 > 0."""
    jump = float(
        (gen.jump_intensities * gen.jump_sizes**2 * np.exp(gen.jump_sizes * lam)).sum()
    )
    return gen.sigma2 + jump
