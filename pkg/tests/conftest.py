import numpy as np
import pytest

from weakdelay import ExperimentConfig, SourceConfig, make_source

PHI_JWM = np.pi / 2 + 0.071
PHI_WVA = 0.03


@pytest.fixture(scope="session")
def source():
    return make_source(SourceConfig())


@pytest.fixture(scope="session")
def omega0():
    return SourceConfig().omega0


def noise_free_config(phi, tau, **kwargs):
    return ExperimentConfig(phi_actual=phi, tau_true=tau, photons=0, **kwargs)
