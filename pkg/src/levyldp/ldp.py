"""Rate function by convex duality of the limit cumulant, and exponential tilting.

With sigma^2 > 0 the cumulant H is strictly convex and H' maps the real line
onto itself, so the dual point lambda*(x) solving H'(lambda) = x exists and is
unique; the rate function is I(x) = lambda* x - H(lambda*).  Tilting by lambda
multiplies atom intensities by exp(lambda v) and shifts the drift by
lambda sigma^2, recentering the process at H'(lambda).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence
from .limit_gen import LimitGenerator, cumulant, cumulant_curvature, cumulant_prime

MAX_ITER = 200
DUAL_TOL = 1e-10


def rate_function(gen: LimitGenerator, x: float) -> tuple[float, float]:
    """Evaluate the rate function at x.  Returns (I(x), lambda*).

    lambda* solves H'(lambda) = x by bracketed Newton: the bracket grows by
    doubling from 0, and any Newton step leaving it falls back to bisection.
    The exp(lambda v) jump terms make unguarded Newton overshoot, hence the
    bracket.  Raises NoConvergence after MAX_ITER iterations (possible only
    with corrupt generator data when sigma^2 > 0).
    """
    x = float(x)
    tol = DUAL_TOL * (1.0 + abs(x))

    # Bracket [lo, hi] with H'(lo) <= x <= H'(hi), grown by doubling.
    lo, hi = 0.0, 0.0
    width = 1.0
    for _ in range(MAX_ITER):
        if cumulant_prime(gen, lo) <= x:
            break
        lo -= width
        width *= 2.0
    else:
        raise NoConvergence(f"failed to bracket below for x = {x:g}")
    width = 1.0
    for _ in range(MAX_ITER):
        if cumulant_prime(gen, hi) >= x:
            break
        hi += width
        width *= 2.0
    else:
        raise NoConvergence(f"failed to bracket above for x = {x:g}")

    lam = 0.5 * (lo + hi)
    for _ in range(MAX_ITER):
        f = cumulant_prime(gen, lam) - x
        if abs(f) <= tol:
            value = lam * x - cumulant(gen, lam)
            return value, lam
        if f < 0.0:
            lo = lam
        else:
            hi = lam
        step = f / cumulant_curvature(gen, lam)
        candidate = lam - step
        if not lo < candidate < hi:
            candidate = 0.5 * (lo + hi)
        lam = candidate
    raise NoConvergence(f"dual solve for x = {x:g} did not reach tolerance {tol:.2e}")


@dataclass(frozen=True)
class RateFunction:
    """Rate function of a limit generator, evaluated pointwise by duality."""

    source: LimitGenerator

    def at(self, x: float) -> tuple[float, float]:
        return rate_function(self.source, x)

    def table(self, x_grid) -> np.ndarray:
        """Rows (x, I(x), lambda*) over a grid."""
        rows = []
        for x in np.atleast_1d(np.asarray(x_grid, dtype=float)):
            value, lam = rate_function(self.source, float(x))
            rows.append((float(x), value, lam))
        return np.array(rows)


@dataclass(frozen=True)
class TiltedModel:
    """Exponentially tilted limit triple; same diffusion, reweighted atoms.

    Field names match LimitGenerator where they overlap, so simulate_limit
    accepts a TiltedModel directly.
    """

    drift: float
    sigma2: float
    jump_sizes: np.ndarray
    jump_intensities: np.ndarray
    lam: float
    mean: float  # displacement rate under the tilt, equals H'(lam)


def tilt(gen: LimitGenerator, lam: float) -> TiltedModel:
    """Tilt the limit triple by lam: drift += lam sigma^2, intensities *= e^(lam v)."""
    drift = gen.drift + lam * gen.sigma2
    intensities = gen.jump_intensities * np.exp(lam * gen.jump_sizes)
    mean = drift + float((gen.jump_sizes * intensities).sum())
    expected = cumulant_prime(gen, lam)
    if abs(mean - expected) > 1e-12 * max(1.0, abs(expected)):
        raise AssertionError(
            f"tilted mean {mean!r} disagrees with H'({lam:g}) = {expected!r}"
        )
    intensities.setflags(write=False)
    return TiltedModel(
        drift=drift,
        sigma2=gen.sigma2,
        jump_sizes=gen.jump_sizes,
        jump_intensities=intensities,
        lam=lam,
        mean=mean,
    )


def grid_legendre(gen: LimitGenerator, lam: float, x_grid) -> float:
    """Recover H(lam) as sup_x [lam x - I(x)] over a grid with parabolic polish.

    The discrete sup is refined once by fitting a parabola through the best
    grid point and its neighbours and evaluating the true objective at the
    fitted vertex, which removes the O(spacing^2) grid bias.
    """
    xs = np.asarray(x_grid, dtype=float)
    values = np.array([lam * x - rate_function(gen, float(x))[0] for x in xs])
    i = int(np.argmax(values))
    best = float(values[i])
    if 0 < i < xs.size - 1:
        x0, x1, x2 = xs[i - 1], xs[i], xs[i + 1]
        f0, f1, f2 = values[i - 1], values[i], values[i + 1]
        denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
        if denom != 0.0:
            a = (x2 * (f1 - f0) + x1 * (f0 - f2) + x0 * (f2 - f1)) / denom
            b = (x2**2 * (f0 - f1) + x1**2 * (f2 - f0) + x0**2 * (f1 - f2)) / denom
            if a < 0.0:
                vertex = -b / (2.0 * a)
                if x0 < vertex < x2:
                    cand = lam * vertex - rate_function(gen, float(vertex))[0]
                    best = max(best, float(cand))
    return best
