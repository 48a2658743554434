"""Shared fixtures.

The expensive objects (resonance search, bound-state normalization, the
background fit) are session-scoped: they are deterministic pure functions
of the default parameter set, so every test that needs them can share one
instance without coupling.
"""

import pytest

import bicscatter as bs


@pytest.fixture(scope="session")
def params():
    return bs.PotentialParams.bic()


@pytest.fixture(scope="session")
def config(params):
    return bs.TruncatedConfig(params=params, a=5000.0)


@pytest.fixture(scope="session")
def doublet_pair(config):
    """The two resonances nearest k=q from the default search box."""
    return bs.doublet_of(bs.find_resonances(config), config.params.q)


@pytest.fixture(scope="session")
def doublet(doublet_pair):
    return bs.Doublet.from_resonances(*doublet_pair)


@pytest.fixture(scope="session")
def psi_b(params):
    return bs.bound_state(params)


@pytest.fixture(scope="session")
def landmarks(config):
    return bs.sigma_landmarks(config, 0.995, 1.005)


@pytest.fixture(scope="session")
def fit(config, doublet):
    return bs.fit_lambda(config, doublet)
