import os
import random

import pytest

from src.model import TIOA
from src.ta_format import load_model
from src.zonegraph import IOLZG, build_iolzg

FIXTURES_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")

ALL_FIXTURES = sorted(f[:-3] for f in os.listdir(FIXTURES_DIR) if f.endswith(".ta"))

# fixtures small enough for exhaustive oracle runs
SMALL_FIXTURES = [
    "f3_a0", "f3_a1", "f3_a2", "f3_a3", "f3_a4", "f3_a5",
    "f5_a1", "f5_a2", "f5_a3", "f5_a4", "f5_a5",
    "server_spec", "server_impl", "client_spec", "client_impl",
    "tau_delay_spec", "tau_delay_impl", "weak_tau",
]


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES_DIR, f"{name}.ta")


def load(name: str) -> TIOA:
    return load_model(fixture_path(name))


def graph(name: str) -> IOLZG:
    return build_iolzg(load(name))


@pytest.fixture
def machine() -> TIOA:
    return load("machine")


@pytest.fixture
def machine_graph() -> IOLZG:
    return graph("machine")


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240917)
