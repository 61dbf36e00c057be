"""Finite-state switching chain: generator algebra, Poisson solver, path simulation.

The switching process is a continuous-time Markov chain on {0, .., n-1} with
rate matrix Q.  The stationary projector Pi and the potential (deviation)
matrix R0 satisfy

    Q R0 = R0 Q = Pi - I,      Pi R0 = R0 Pi = 0,

which makes R0 the inverse of -Q on mean-zero vectors.  These identities are
what the rest of the package leans on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import SingularSystem, SolvabilityViolated

ROW_SUM_TOL = 1e-12
COND_LIMIT = 1e12
POISSON_RHS_TOL = 1e-9


@dataclass(frozen=True)
class ChainModel:
    """Rate matrix of the switching chain plus derived exit rates and jump kernel."""

    Q: np.ndarray

    def __post_init__(self):
        Q = np.array(self.Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or Q.shape[0] < 1:
            raise ValueError(f"Q must be a square matrix, got shape {Q.shape}")
        off = Q.copy()
        np.fill_diagonal(off, 0.0)
        if (off < 0.0).any():
            raise ValueError("off-diagonal rates must be nonnegative")
        row_sums = Q.sum(axis=1)
        if np.abs(row_sums).max() > ROW_SUM_TOL:
            raise ValueError(f"rows of Q must sum to 0 within {ROW_SUM_TOL}, got {row_sums}")
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    @property
    def exit_rates(self) -> np.ndarray:
        """Per-state exit rate q(x) = -Q[x, x]."""
        return -np.diag(self.Q)

    @property
    def jump_kernel(self) -> np.ndarray:
        """Embedded jump kernel P(x, y) = Q[x, y] / q(x); zero row where q(x) = 0."""
        P = self.Q.copy()
        np.fill_diagonal(P, 0.0)
        q = self.exit_rates
        alive = q > 0.0
        P[alive] /= q[alive, None]
        return P


@dataclass(frozen=True)
class ChainAnalysis:
    """Stationary distribution pi, projector Pi, and potential matrix R0,
    together with the chain they were derived from."""

    model: ChainModel
    pi: np.ndarray
    Pi: np.ndarray
    R0: np.ndarray

    @property
    def n(self) -> int:
        return self.pi.shape[0]

    def project(self, f: np.ndarray) -> float:
        """Stationary average of a per-state vector."""
        return float(self.pi @ f)


def _check_irreducible(Q: np.ndarray) -> None:
    support = csr_matrix(Q > 0.0)
    ncomp, _ = connected_components(support, directed=True, connection="strong")
    if ncomp != 1:
        raise SingularSystem(
            f"switching generator is reducible ({ncomp} communicating classes); "
            "a uniquely ergodic chain is required"
        )


def analyze_chain(model: ChainModel) -> ChainAnalysis:
    """Compute (pi, Pi, R0) for an irreducible switching generator.

    R0 is realized as (Pi - Q)^-1 - Pi, the deviation-matrix form, via a dense
    LU solve.  Raises SingularSystem if Q is reducible or if (Pi - Q) is
    numerically singular.
    """
    n = model.n
    Q = model.Q
    if n == 1:
        return ChainAnalysis(model=model, pi=np.ones(1), Pi=np.ones((1, 1)), R0=np.zeros((1, 1)))
    _check_irreducible(Q)

    # pi Q = 0 with sum(pi) = 1: replace one balance equation by normalization.
    A = Q.T.copy()
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"stationary system is singular: {exc}") from exc
    if pi.min() <= 0.0 or abs(pi.sum() - 1.0) > 1e-10:
        raise SingularSystem(
            f"stationary solve produced an invalid distribution (min={pi.min():.3e})"
        )

    Pi = np.tile(pi, (n, 1))
    M = Pi - Q
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularSystem(f"(Pi - Q) condition number {cond:.3e} exceeds {COND_LIMIT:.0e}")
    R0 = np.linalg.solve(M, np.eye(n)) - Pi

    for arr in (pi, Pi, R0):
        arr.setflags(write=False)
    return ChainAnalysis(model=model, pi=pi, Pi=Pi, R0=R0)


def solve_poisson(analysis: ChainAnalysis, psi: np.ndarray) -> np.ndarray:
    """Solve Q phi = psi for the mean-zero solution phi = -R0 psi.

    The right-hand side must satisfy the solvability condition pi . psi = 0;
    the tolerance scales with ||psi||_inf for large inputs.
    """
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (analysis.n,):
        raise ValueError(f"psi must have shape ({analysis.n},), got {psi.shape}")
    scale = max(1.0, float(np.abs(psi).max()))
    avg = float(analysis.pi @ psi)
    if abs(avg) > POISSON_RHS_TOL * scale:
        raise SolvabilityViolated(
            f"stationary average of rhs is {avg:.3e}, exceeds {POISSON_RHS_TOL:.0e}"
        )
    return -(analysis.R0 @ psi)


@dataclass(frozen=True)
class ChainPath:
    """Piecewise-constant trajectory: state states[k] holds on [times[k], times[k+1])."""

    times: np.ndarray   # jump epochs, times[0] = 0
    states: np.ndarray  # visited states, len(states) == len(times)
    horizon: float

    @property
    def n_jumps(self) -> int:
        return len(self.times) - 1

    def occupation_fractions(self, n: int) -> np.ndarray:
        """Fraction of [0, horizon] spent in each of the n states."""
        bounds = np.append(self.times, self.horizon)
        durations = np.diff(bounds)
        occ = np.zeros(n)
        np.add.at(occ, self.states, durations)
        return occ / self.horizon

    def holding_times(self, state: int) -> np.ndarray:
        """Completed sojourn durations in the given state (final truncated one excluded)."""
        durations = np.diff(self.times)
        return durations[self.states[:-1] == state]


def simulate_chain(
    model: ChainModel, x0: int, horizon: float, rng: np.random.Generator
) -> ChainPath:
    """Simulate the switching chain by exponential holding times and the embedded kernel.

    Deterministic given the generator state; parallel callers must pass
    independent generators.
    """
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")
    if not 0 <= x0 < model.n:
        raise ValueError(f"x0={x0} outside state space of size {model.n}")

    q = model.exit_rates
    cum_kernel = np.cumsum(model.jump_kernel, axis=1)
    times = [0.0]
    states = [x0]
    t = 0.0
    x = x0
    while True:
        rate = q[x]
        if rate <= 0.0:
            break
        t += rng.exponential(1.0 / rate)
        if t >= horizon:
            break
        # min() guards the measure-zero event of the uniform landing beyond
        # a cumulative row whose last entry rounded below 1
        x = min(int(np.searchsorted(cum_kernel[x], rng.random())), model.n - 1)
        times.append(t)
        states.append(x)
    return ChainPath(
        times=np.array(times), states=np.array(states, dtype=np.int64), horizon=horizon
    )
