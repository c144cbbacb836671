import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracle helpers

from cdaimo.scenario import load_scenario, reason


@pytest.fixture(scope="session")
def usecase_text() -> str:
    return (resources.files("cdaimo") / "data/usecase.cdaimo").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def usecase_path() -> str:
    return str(resources.files("cdaimo") / "data/usecase.cdaimo")


@pytest.fixture()
def usecase_load(usecase_text):
    return load_scenario(usecase_text)


@pytest.fixture()
def usecase_reasoned(usecase_load):
    return reason(usecase_load)
