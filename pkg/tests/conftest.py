import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kgforage.client import BackendConfig, KgClient
from kgforage.graph_store import load_fixture_file
from kgforage.table import import_csv

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
MINI = FIXTURES / "mini_countries.jsonl"
ACLED = FIXTURES / "acled_countries.jsonl"


@pytest.fixture(scope="session")
def mini_graph():
    return load_fixture_file(MINI)


@pytest.fixture()
def mini_client(mini_graph):
    return KgClient(BackendConfig(kind="local", fixture_path=str(MINI)), graph=mini_graph)


@pytest.fixture()
def mini_dataset():
    return import_csv(b"Country\nAtlantis\nBorduria\nCascadia\n")


@pytest.fixture(scope="session")
def acled_graph():
    return load_fixture_file(ACLED)


@pytest.fixture()
def acled_client(acled_graph):
    return KgClient(BackendConfig(kind="local", fixture_path=str(ACLED)), graph=acled_graph)
