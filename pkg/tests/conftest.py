import pytest

from pdarena.config import load_roster
from pdarena.engine import Match
from pdarena.health import load_m2mm


@pytest.fixture(scope="session")
def m2mm():
    return load_m2mm()


@pytest.fixture(scope="session")
def default_match():
    actions, rules = load_roster()
    return Match(actions, rules, load_m2mm())
