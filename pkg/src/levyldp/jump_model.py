"""Per-state jump data and the concrete small-jump family that realizes it.

Each switching state x carries drift coefficients a1(x), a(x), a second-moment
coefficient c(x), and a finite-atom residual measure gamma0 listing (size,
intensity) pairs.  At scale delta the pre-limit intensity measure places two
atoms at +/-delta plus the residual atoms shrunk by delta^2, chosen so that

    mean   = delta a1(x) + delta^2 a(x)        (exactly)
    2nd mom = delta^2 c(x)                      (exactly)

hold as algebraic identities rather than asymptotics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .chain import ChainAnalysis
from .errors import NegativeIntensity

BALANCE_TOL = 1e-10

AtomList = Sequence[tuple[float, float]]


def _as_atom_array(atoms: AtomList) -> np.ndarray:
    arr = np.array(atoms, dtype=float).reshape(-1, 2)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class JumpModel:
    """Per-state jump coefficients; gamma0[x] is a finite list of (size, intensity) atoms.

    The margin c(x) - c0(x) - |a1(x)| must be positive for the pre-limit
    construction to stay a positive measure at small scales; build_prelimit
    enforces it at the scale actually requested.
    """

    a1: np.ndarray
    a: np.ndarray
    c: np.ndarray
    gamma0: tuple[np.ndarray, ...]

    def __post_init__(self):
        a1 = np.array(self.a1, dtype=float)
        a = np.array(self.a, dtype=float)
        c = np.array(self.c, dtype=float)
        if not (a1.shape == a.shape == c.shape) or a1.ndim != 1:
            raise ValueError("a1, a, c must be equal-length vectors")
        if not (np.isfinite(a1).all() and np.isfinite(a).all() and np.isfinite(c).all()):
            raise ValueError("jump coefficients must be finite")
        atoms = tuple(_as_atom_array(g) for g in self.gamma0)
        if len(atoms) != a1.shape[0]:
            raise ValueError("gamma0 must supply one atom list per state")
        for x, arr in enumerate(atoms):
            if arr.size and (arr[:, 1] < 0.0).any():
                raise ValueError(f"state {x}: atom intensities must be nonnegative")
        for arr in (a1, a, c):
            arr.setflags(write=False)
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "gamma0", atoms)

    @property
    def n(self) -> int:
        return self.a1.shape[0]

    @property
    def a0(self) -> np.ndarray:
        """First moment of the residual measure per state."""
        return np.array([float((g[:, 0] * g[:, 1]).sum()) for g in self.gamma0])

    @property
    def c0(self) -> np.ndarray:
        """Second moment of the residual measure per state."""
        return np.array([float((g[:, 0] ** 2 * g[:, 1]).sum()) for g in self.gamma0])

    def residual_integral(self, x: int, g: Callable[[np.ndarray], np.ndarray]) -> float:
        """Integral of g against the residual measure of state x."""
        atoms = self.gamma0[x]
        if atoms.size == 0:
            return 0.0
        return float((g(atoms[:, 0]) * atoms[:, 1]).sum())


@dataclass(frozen=True)
class PrelimitMeasure:
    """Atomized intensity measure at a fixed scale delta, one atom list per state.

    sizes[x] / intensities[x] are aligned arrays; the first two entries are the
    +/-delta atoms, the rest are the shrunk residual atoms.
    """

    delta: float
    sizes: tuple[np.ndarray, ...]
    intensities: tuple[np.ndarray, ...]
    lam_plus: np.ndarray
    lam_minus: np.ndarray

    @property
    def n(self) -> int:
        return len(self.sizes)

    def total_mass(self, x: int) -> float:
        return float(self.intensities[x].sum())

    def masses(self) -> np.ndarray:
        return np.array([self.total_mass(x) for x in range(self.n)])

    def moment(self, x: int, power: int) -> float:
        return float((self.sizes[x] ** power * self.intensities[x]).sum())

    def integral(self, x: int, g: Callable[[np.ndarray], np.ndarray]) -> float:
        return float((g(self.sizes[x]) * self.intensities[x]).sum())


def build_prelimit(model: JumpModel, delta: float) -> PrelimitMeasure:
    """Construct the pre-limit measure at scale delta.

    Per state the +/-delta intensities are
        lam(+/-) = ((c - c0) +/- (a1 + delta (a - a0))) / 2,
    which pins both moment identities exactly.  Raises NegativeIntensity when
    either intensity would be negative at this delta.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    a0 = model.a0
    c0 = model.c0
    spread = model.c - c0
    signed = model.a1 + delta * (model.a - a0)
    bad = spread < np.abs(signed)
    if bad.any():
        x = int(np.argmax(bad))
        raise NegativeIntensity(
            f"state {x}: c - c0 = {spread[x]:.6g} < |a1 + delta (a - a0)| = "
            f"{abs(signed[x]):.6g} at delta = {delta:.6g}"
        )
    lam_plus = 0.5 * (spread + signed)
    lam_minus = 0.5 * (spread - signed)

    sizes = []
    intensities = []
    for x in range(model.n):
        atoms = model.gamma0[x]
        sz = np.concatenate(([delta, -delta], atoms[:, 0]))
        it = np.concatenate(([lam_plus[x], lam_minus[x]], delta * delta * atoms[:, 1]))
        sz.setflags(write=False)
        it.setflags(write=False)
        sizes.append(sz)
        intensities.append(it)
    lam_plus.setflags(write=False)
    lam_minus.setflags(write=False)
    return PrelimitMeasure(
        delta=delta,
        sizes=tuple(sizes),
        intensities=tuple(intensities),
        lam_plus=lam_plus,
        lam_minus=lam_minus,
    )


def sigma_squared(model: JumpModel, analysis: ChainAnalysis) -> float:
    """Averaged diffusion coefficient: (c~ - c0~) + 2 sum_x pi(x) a1(x) (R0 a1)(x)."""
    pi = analysis.pi
    spread = float(pi @ (model.c - model.c0))
    correction = 2.0 * float(pi @ (model.a1 * (analysis.R0 @ model.a1)))
    return spread + correction


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the structural checks on a (chain, jump) model pair."""

    balance_residual: float
    balance_ok: bool
    max_residual_jump: float
    square_integrable: bool   # finite atom lists make this structural
    exponential_moments: bool  # likewise structural for finite atoms
    sigma2: float
    sigma2_positive: bool

    @property
    def passed(self) -> bool:
        return self.balance_ok and self.sigma2_positive

    def lines(self) -> list[str]:
        out = [
            f"balance residual |pi . a1| = {self.balance_residual:.3e} "
            f"({'ok' if self.balance_ok else 'FAIL'})",
            f"square integrability: structural (finite atoms), max |jump| = "
            f"{self.max_residual_jump:.6g}",
            "exponential moments: structural (finite atoms)",
            f"sigma^2 = {float(self.sigma2)!r} ({'ok' if self.sigma2_positive else 'NOT POSITIVE'})",
        ]
        return out


def validate_conditions(model: JumpModel, analysis: ChainAnalysis) -> ValidationReport:
    """Check the stationary balance of a1 and the positivity of sigma^2.

    Square integrability and exponential moment finiteness hold structurally
    for finite atom lists and are reported as such.
    """
    if model.n != analysis.n:
        raise ValueError("jump model and chain analysis disagree on state count")
    residual = abs(float(analysis.pi @ model.a1))
    max_jump = 0.0
    for atoms in model.gamma0:
        if atoms.size:
            max_jump = max(max_jump, float(np.abs(atoms[:, 0]).max()))
    s2 = sigma_squared(model, analysis)
    return ValidationReport(
        balance_residual=residual,
        balance_ok=residual <= BALANCE_TOL,
        max_residual_jump=max_jump,
        square_integrable=True,
        exponential_moments=True,
        sigma2=s2,
        sigma2_positive=s2 > 0.0,
    )
