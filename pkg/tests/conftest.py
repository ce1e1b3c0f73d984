import os
import random
import sys

import pytest
from hypothesis import HealthCheck, settings

from efq.corpus import colour_models, marked_models
from efq.quantifiers import QuantifierSet
from efq.structures import Context

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")

# criterion number -> (passed, detail); filled by the acceptance suite, printed at the end of the run
CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    def _record(number: int, passed: bool, detail: str) -> None:
        CRITERIA[number] = (passed, detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}", file=sys.stderr)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n}: {detail}")


@pytest.fixture
def colours():
    return {k: Context(v) for k, v in colour_models().items()}


@pytest.fixture
def marked():
    return {k: Context(v) for k, v in marked_models().items()}


@pytest.fixture
def exactly3():
    return QuantifierSet.of("exactly=3")


@pytest.fixture
def rng():
    return random.Random(12345)
