import numpy as np
import pytest

import macrofield as mf


@pytest.fixture(scope="session")
def frg():
    return mf.frg_dataset()


@pytest.fixture(scope="session")
def derived(frg):
    return mf.derive_indicators(frg)


@pytest.fixture(scope="session")
def baseline_traj():
    """Reference currency-unit run, 1950 start, to collapse."""
    return mf.integrate(mf.frg_baseline_params(), horizon=85.0)


@pytest.fixture(scope="session")
def points_traj():
    """Normalized points run used by the inflation replica."""
    return mf.integrate(mf.frg_points_params(), horizon=83.0)


@pytest.fixture(scope="session")
def chained_traj():
    return mf.frg_chained_trajectory()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20120831)
