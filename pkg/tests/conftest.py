import pytest

from seamreq import corpus_path
from seamreq.resolve import load_project

BASE = ("clock_requirements.sreq",)
EXTENDED = ("clock_requirements.sreq", "extended_clock_requirements.sreq")


def load(*names):
    return load_project([corpus_path(n) for n in names])


@pytest.fixture(scope="session")
def clock_project():
    """Base requirements against the closed clock contract."""
    return load(*BASE, "clock_existing.sreq")


@pytest.fixture(scope="session")
def inferred_project():
    """Base requirements against the inferred contract and matching body."""
    return load(*BASE, "clock_increment0.sreq")


@pytest.fixture(scope="session")
def extended_project():
    """All eleven requirements against the final clock."""
    return load(*EXTENDED, "clock_increment3.sreq")


@pytest.fixture(scope="session")
def train_project():
    return load("train.sreq", "train_requirements.sreq")
