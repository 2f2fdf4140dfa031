import pytest

from noumenal import ClassicalTheory, LocalRealisticModel, QuantumTheory, SamplingBudget
from noumenal.sabotage import full_symmetric_2x2


@pytest.fixture(scope="session")
def c22():
    return full_symmetric_2x2()


@pytest.fixture(scope="session")
def c22_product():
    return ClassicalTheory.uniform(2, 2, name="classical_product")


@pytest.fixture(scope="session")
def q2():
    return QuantumTheory(2)


@pytest.fixture(scope="session")
def c22_model(c22):
    return LocalRealisticModel(c22)


@pytest.fixture(scope="session")
def q2_model(q2):
    return LocalRealisticModel(q2)


@pytest.fixture
def small_budget():
    return SamplingBudget("sampled", sample_count=60, seed=3)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "CRITERIA_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
