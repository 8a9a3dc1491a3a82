import sys
from dataclasses import replace
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from osaas_probe.catalog import default_catalog, regional_catalog
from osaas_probe.linesystem import LineSystem
from osaas_probe.modem import ModemModel, characterize
from osaas_probe.presets import preset

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture(scope="session")
def catalog_regional():
    return regional_catalog()


@pytest.fixture(scope="session")
def modem():
    return ModemModel(26.0)


@pytest.fixture(scope="session")
def curves(catalog, modem):
    return {cfg.config_id: characterize(modem, cfg) for cfg in catalog}


@pytest.fixture(scope="session")
def make_line(modem):
    def factory(name, sigma=None, seed=None):
        link = preset(name).link
        if sigma is not None:
            link = replace(link, noise_sigma_q_db=sigma)
        if seed is not None:
            link = replace(link, seed=seed)
        return LineSystem(link, modem)
    return factory
