import pytest

from snsradar import RadarParams, default_params, derive_metrics

C_ROUND = 3.0e8
"""Round speed of light: makes the 77 GHz design point come out at the
textbook values (0.15 m resolution, 307.2 m span)."""


@pytest.fixture(scope="session")
def table1():
    return default_params()


@pytest.fixture(scope="session")
def metrics1(table1):
    return derive_metrics(table1, C_ROUND)


@pytest.fixture(scope="session")
def small():
    # 64 MHz band, 16-sample cyclic prefix: cheap enough for exhaustive checks
    return RadarParams(
        n_subcarriers=64,
        n_symbols=8,
        subcarrier_spacing=1.0e6,
        carrier_freq=77.0e9,
        cp_duration=2.5e-7,
    )


@pytest.fixture(scope="session")
def mid():
    # quarter-scale cut of the 77 GHz numerology: statistics without the wait
    return RadarParams(
        n_subcarriers=512,
        n_symbols=64,
        subcarrier_spacing=488_281.25,
        carrier_freq=77.0e9,
        cp_duration=0.512e-6,
    )
