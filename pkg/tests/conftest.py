from fractions import Fraction

import pytest
from hypothesis import settings

from genericsub.config import EngineConfig, sqrt2_config
from genericsub.exactnum import FieldSpec, RingSpec

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def Q():
    return FieldSpec.rationals()


@pytest.fixture
def K():
    """Q(a) with a^2 = 2."""
    return FieldSpec.number_field((-2, 0, 1))


@pytest.fixture
def Kord():
    return FieldSpec.number_field((-2, 0, 1), ordered=True, root_index=1)


@pytest.fixture
def cfg():
    return EngineConfig()


@pytest.fixture
def cfg2():
    return sqrt2_config()


@pytest.fixture
def cfg_ord():
    return EngineConfig(FieldSpec.rationals(True), RingSpec.integers())


@pytest.fixture
def cfg2_ord():
    return sqrt2_config(ordered=True)


@pytest.fixture
def Zhalf_cfg():
    return EngineConfig(FieldSpec.rationals(), RingSpec.localization([2]))


def frac(x):
    return Fraction(x)


# acceptance criteria report one line each; collected here and printed after the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
