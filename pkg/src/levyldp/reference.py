"""Shipped reference models used by tests, scripts, and the example configs."""

from __future__ import annotations

import numpy as np

from .chain import ChainModel
from .jump_model import JumpModel


def two_state() -> tuple[ChainModel, JumpModel]:
    """Symmetric two-state switch with opposed first-order drifts.

    Hand-checkable: pi = (1/2, 1/2), R0 = [[1/4, -1/4], [-1/4, 1/4]],
    averaged coefficients (a~, a0~, c~, c0~) = (0.5, 0, 3, 0.2), sigma^2 = 3.8,
    averaged residual atoms {(+1, 0.1), (-1, 0.1)}.
    """
    chain = ChainModel(Q=np.array([[-1.0, 1.0], [1.0, -1.0]]))
    jump = JumpModel(
        a1=np.array([1.0, -1.0]),
        a=np.array([0.5, 0.5]),
        c=np.array([3.0, 3.0]),
        gamma0=(
            np.array([[1.0, 0.2]]),
            np.array([[-1.0, 0.2]]),
        ),
    )
    return chain, jump


def three_state() -> tuple[ChainModel, JumpModel]:
    """Asymmetric three-state switch whose column sums vanish, so pi is uniform
    and the balance of a1 = (1, 1, -2) is exact.  State 1 carries no residual
    atoms, exercising the empty-measure paths."""
    chain = ChainModel(
        Q=np.array(
            [
                [-3.0, 2.0, 1.0],
                [1.0, -2.0, 1.0],
                [2.0, 0.0, -2.0],
            ]
        )
    )
    jump = JumpModel(
        a1=np.array([1.0, 1.0, -2.0]),
        a=np.array([0.2, -0.4, 0.5]),
        c=np.array([4.0, 5.0, 6.0]),
        gamma0=(
            np.array([[0.5, 0.4]]),
            np.empty((0, 2)),
            np.array([[-1.5, 0.1], [0.8, 0.3]]),
        ),
    )
    return chain, jump


def single_state(
    a1: float = 0.0,
    a: float = 0.0,
    c: float = 1.0,
    gamma0: tuple[tuple[float, float], ...] = (),
) -> tuple[ChainModel, JumpModel]:
    """One-state model: no switching, so moments of the evolution are closed form.

    With the default a1 = 0 the balance condition holds and the model is
    usable in convergence sweeps; a nonzero a1 is fine for simulator moment
    checks, which do not average over states.
    """
    chain = ChainModel(Q=np.array([[0.0]]))
    atoms = np.array(gamma0, dtype=float).reshape(-1, 2)
    jump = JumpModel(
        a1=np.array([a1]), a=np.array([a]), c=np.array([c]), gamma0=(atoms,)
    )
    return chain, jump


SHIPPED = {"two_state": two_state, "three_state": three_state}
