import numpy as np
import pytest

from c2ctrust import SimConfig, run_simulation
from c2ctrust.agents import THREAT_MODELS

ACCEPTANCE_SEEDS = range(20)
_criteria: dict[str, str] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def default_runs():
    """Default-parameter runs for every model over the acceptance seeds, computed once."""
    return {m: [run_simulation(SimConfig(model=m, seed=s)) for s in ACCEPTANCE_SEEDS] for m in THREAT_MODELS}


@pytest.fixture
def criterion():
    def record(key: str, ok: bool, detail: str) -> None:
        _criteria[key] = f"{'PASS' if ok else 'FAIL'}  {key}: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for key in sorted(_criteria, key=lambda k: int(k.split()[0])):
            terminalreporter.write_line(_criteria[key])
