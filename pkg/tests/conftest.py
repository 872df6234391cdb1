import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

import orth_audit  # noqa: E402

orth_audit.install()


def pytest_terminal_summary(terminalreporter):
    import acceptance_log
    if acceptance_log.lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.lines:
            terminalreporter.write_line(line)
        r = orth_audit.runs
        terminalreporter.write_line(f"orthonormality audit over the whole session: {r['count']} train_subspace runs, "
                                    f"{r['rounds']} iterations, worst |QQ'-I| = {r['worst']:.1e}")
