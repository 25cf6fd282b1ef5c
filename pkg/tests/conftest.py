import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rng_of(seed: int) -> random.Random:
    return random.Random(seed)


def corpus_files() -> list[Path]:
    return sorted(CORPUS.glob("*.yaml"))


@pytest.fixture
def worked_spp():
    from sortpoint.codec import read_instance

    return read_instance(CORPUS / "worked_spp.yaml")


@pytest.fixture
def worked_rspp():
    from sortpoint.codec import read_instance

    return read_instance(CORPUS / "worked_rspp.yaml")
