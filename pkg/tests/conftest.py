import numpy as np
import pytest

from levyldp import analyze_chain, build_limit_generator, three_state, two_state


@pytest.fixture(scope="session")
def two_state_setup():
    chain, jump = two_state()
    analysis = analyze_chain(chain)
    gen = build_limit_generator(jump, analysis)
    return chain, jump, analysis, gen


@pytest.fixture(scope="session")
def three_state_setup():
    chain, jump = three_state()
    analysis = analyze_chain(chain)
    gen = build_limit_generator(jump, analysis)
    return chain, jump, analysis, gen


@pytest.fixture(scope="session")
def u_grid():
    return np.linspace(-2.0, 2.0, 41)
