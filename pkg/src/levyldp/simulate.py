"""Monte Carlo for the pre-limit switched evolution and the limit jump process.

Endpoints are what the scaled-cumulant and rare-event diagnostics consume, so
simulation returns endpoint samples by default.  Every path draws from its own
generator keyed by (seed, path index), which makes results independent of how
paths are batched across workers.

The pre-limit sampler draws the switching skeleton event by event, then adds
the jump contribution per (state, atom) as Poisson counts on the occupied
time, which has exactly the law of the event-by-event competing-risks scheme
but runs orders of magnitude faster.  A literal event-driven variant is kept
for single-path event logs.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .chain import ChainAnalysis, ChainModel
from .errors import BudgetExceeded, DegenerateSample
from .exp_gen import ScalePair
from .jump_model import PrelimitMeasure
from .limit_gen import LimitGenerator

RNG_BLOCK = 4096


@dataclass(frozen=True)
class SimConfig:
    """Scales, horizon, path count and seeding for a simulation run.

    x0 = None draws the initial switching state from the stationary
    distribution per path; a fixed state index pins it instead.
    """

    scales: ScalePair
    horizon: float
    paths: int
    seed: int
    x0: int | None = None
    u0: float = 0.0
    event_budget: float = 1e8

    def __post_init__(self):
        if self.horizon <= 0.0:
            raise ValueError("horizon must be positive")
        if self.paths < 1:
            raise ValueError("paths must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def path_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for one path; stable under any batch decomposition."""
    return np.random.default_rng([int(seed), int(index)])


def expected_events_per_path(
    chain: ChainModel, analysis: ChainAnalysis, measure: PrelimitMeasure, cfg: SimConfig
) -> float:
    """Stationary-average event rate (switches plus jumps) times the horizon."""
    eps = cfg.scales.eps
    per_state = chain.exit_rates + measure.masses()
    return cfg.horizon * float(analysis.pi @ per_state) / eps**3


@dataclass(frozen=True)
class PrelimitSample:
    """Endpoint sample of the pre-limit evolution with per-path event counts."""

    endpoints: np.ndarray
    switches: np.ndarray
    jumps: np.ndarray

    @property
    def events(self) -> np.ndarray:
        return self.switches + self.jumps


def _skeleton(rng, scaled_q, cum_rows, x0, horizon):
    """Occupation time per state and switch count for one switching path."""
    n = len(scaled_q)
    occ = np.zeros(n)
    x = x0
    t_rem = horizon
    switches = 0
    exp_block = np.empty(0)
    uni_block = np.empty(0)
    i = 0
    while True:
        rate = scaled_q[x]
        if rate <= 0.0:
            occ[x] += t_rem
            break
        if i >= exp_block.size:
            exp_block = rng.standard_exponential(RNG_BLOCK)
            uni_block = rng.random(RNG_BLOCK)
            i = 0
        hold = exp_block[i] / rate
        if hold >= t_rem:
            occ[x] += t_rem
            break
        occ[x] += hold
        t_rem -= hold
        x = min(bisect.bisect(cum_rows[x], uni_block[i]), n - 1)
        switches += 1
        i += 1
    return occ, switches


def simulate_prelimit(
    chain: ChainModel,
    analysis: ChainAnalysis,
    measure: PrelimitMeasure,
    cfg: SimConfig,
    path_offset: int = 0,
    path_count: int | None = None,
) -> PrelimitSample:
    """Sample endpoints of the switched evolution for paths [offset, offset + count).

    In state x the chain switches at rate q(x)/eps^3 and each measure atom
    (v, g) fires at rate g/eps^3 contributing a displacement eps * v.  Jump
    contributions are drawn as Poisson counts on the per-state occupation
    time, which is the same law as the competing-risks event loop.
    """
    expected = expected_events_per_path(chain, analysis, measure, cfg)
    if expected > cfg.event_budget:
        raise BudgetExceeded(
            f"expected {expected:.3e} events per path exceeds budget {cfg.event_budget:.3e}"
        )
    count = cfg.paths if path_count is None else path_count
    if path_offset < 0 or count < 0 or path_offset + count > cfg.paths:
        raise ValueError("path range outside [0, cfg.paths)")
    if cfg.x0 is not None and not 0 <= cfg.x0 < chain.n:
        raise ValueError(f"x0={cfg.x0} outside state space of size {chain.n}")

    eps = cfg.scales.eps
    inv_eps3 = 1.0 / eps**3
    scaled_q = chain.exit_rates * inv_eps3
    cum_rows = [list(np.cumsum(row)) for row in chain.jump_kernel]
    cum_pi = np.cumsum(analysis.pi)
    n = chain.n

    endpoints = np.empty(count)
    switch_counts = np.empty(count, dtype=np.int64)
    jump_counts = np.empty(count, dtype=np.int64)
    for k in range(count):
        rng = path_rng(cfg.seed, path_offset + k)
        if cfg.x0 is None:
            x0 = min(int(np.searchsorted(cum_pi, rng.random())), n - 1)
        else:
            x0 = cfg.x0
        occ, switches = _skeleton(rng, scaled_q, cum_rows, x0, cfg.horizon)
        pos = cfg.u0
        jumps = 0
        for x in range(n):
            if occ[x] <= 0.0 or measure.sizes[x].size == 0:
                continue
            counts = rng.poisson(measure.intensities[x] * (inv_eps3 * occ[x]))
            jumps += int(counts.sum())
            pos += eps * float(measure.sizes[x] @ counts)
        endpoints[k] = pos
        switch_counts[k] = switches
        jump_counts[k] = jumps
    return PrelimitSample(endpoints=endpoints, switches=switch_counts, jumps=jump_counts)


def simulate_prelimit_events(
    chain: ChainModel,
    analysis: ChainAnalysis,
    measure: PrelimitMeasure,
    cfg: SimConfig,
    path_index: int = 0,
) -> list[tuple[float, str, int, float]]:
    """Literal competing-risks event log for one path: (time, kind, state, position).

    Meant for inspection of small runs; the batched sampler is the fast path.
    """
    if cfg.x0 is not None and not 0 <= cfg.x0 < chain.n:
        raise ValueError(f"x0={cfg.x0} outside state space of size {chain.n}")
    eps = cfg.scales.eps
    inv_eps3 = 1.0 / eps**3
    rng = path_rng(cfg.seed, path_index)
    cum_pi = np.cumsum(analysis.pi)
    if cfg.x0 is None:
        x = min(int(np.searchsorted(cum_pi, rng.random())), chain.n - 1)
    else:
        x = cfg.x0
    q = chain.exit_rates
    cum_rows = [np.cumsum(row) for row in chain.jump_kernel]
    masses = measure.masses()

    events = [(0.0, "start", x, cfg.u0)]
    t = 0.0
    pos = cfg.u0
    guard = int(10 * max(1.0, expected_events_per_path(chain, analysis, measure, cfg))) + 1000
    for _ in range(guard):
        total = (q[x] + masses[x]) * inv_eps3
        if total <= 0.0:
            break
        t += rng.exponential(1.0 / total)
        if t >= cfg.horizon:
            break
        if rng.random() < q[x] / (q[x] + masses[x]):
            x = min(int(np.searchsorted(cum_rows[x], rng.random())), chain.n - 1)
            events.append((t, "switch", x, pos))
        else:
            probs = measure.intensities[x] / masses[x]
            atom = min(
                int(np.searchsorted(np.cumsum(probs), rng.random())), probs.size - 1
            )
            pos += eps * measure.sizes[x][atom]
            events.append((t, "jump", x, pos))
    events.append((cfg.horizon, "end", x, pos))
    return events


def simulate_limit(
    gen: LimitGenerator,
    cfg: SimConfig,
    path_offset: int = 0,
    path_count: int | None = None,
) -> np.ndarray:
    """Exact endpoint sample of the limit process: drift + Gaussian + Poisson atoms."""
    count = cfg.paths if path_count is None else path_count
    if path_offset < 0 or count < 0 or path_offset + count > cfg.paths:
        raise ValueError("path range outside [0, cfg.paths)")
    t = cfg.horizon
    scale = np.sqrt(gen.sigma2 * t)
    lam = gen.jump_intensities * t
    endpoints = np.empty(count)
    for k in range(count):
        rng = path_rng(cfg.seed, path_offset + k)
        pos = cfg.u0 + gen.drift * t + scale * rng.standard_normal()
        if lam.size:
            counts = rng.poisson(lam)
            pos += float(gen.jump_sizes @ counts)
        endpoints[k] = pos
    return endpoints


@dataclass(frozen=True)
class ScgfEstimate:
    """One point of the empirical scaled cumulant generating function."""

    lam: float
    value: float
    std_error: float
    n_effective: float

    @property
    def reliable(self) -> bool:
        return self.n_effective >= 10.0


def estimate_scgf(
    endpoints: np.ndarray, scales: ScalePair, lambda_grid
) -> list[ScgfEstimate]:
    """Empirical SCGF eps * ln mean(exp(lambda xi / eps)) with delta-method errors.

    Uses a max-shifted log-sum-exp; the standard error is
    eps * sd(w) / (sqrt(N) mean(w)) with w the shifted weights, and the
    effective sample size is (sum w)^2 / sum(w^2).
    """
    xi = np.asarray(endpoints, dtype=float)
    if xi.size == 0:
        raise ValueError("endpoints must be non-empty")
    if np.ptp(xi) == 0.0:
        raise DegenerateSample("all endpoints are identical")
    eps = scales.eps
    out = []
    for lam in np.atleast_1d(np.asarray(lambda_grid, dtype=float)):
        arg = lam * xi / eps
        shift = arg.max()
        w = np.exp(arg - shift)
        mean_w = w.mean()
        value = eps * (shift + np.log(mean_w))
        if not np.isfinite(value):
            raise OverflowError(f"SCGF value not finite at lambda = {lam:g}")
        se = eps * w.std(ddof=1) / (np.sqrt(w.size) * mean_w)
        ess = float(w.sum() ** 2 / (w**2).sum())
        out.append(
            ScgfEstimate(lam=float(lam), value=float(value), std_error=float(se), n_effective=ess)
        )
    return out
