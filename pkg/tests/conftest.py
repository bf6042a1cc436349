import numpy as np
import pytest

from blockdiag import BlockMatrix

# filled by tests/test_acceptance.py, printed in the terminal summary
ACCEPTANCE_RESULTS = []


@pytest.fixture
def acceptance():
    def _record(criterion: str, ok: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS.append((criterion, ok, detail))

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"{status}  {criterion}: {detail}")


@pytest.fixture
def analytic():
    """1+1 fixture [[0, 1], [1, 2]] with closed-form eigensystem."""
    return BlockMatrix([0], [2], [1], [1])


@pytest.fixture
def one_point():
    """2+2 fixture whose diagonal spectra touch at 0 with a planted kernel."""
    w1 = np.array([[0.0, 0.0], [0.0, 1.0]])
    return BlockMatrix(np.diag([0.0, -1.0]), np.diag([0.0, 2.0]), w1.conj().T, w1)


def random_block(rng, n0, n1, scale=1.0):
    """Generic dense complex block matrix (no symmetry)."""

    def mat(r, c):
        return scale * (rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c)))

    return BlockMatrix(mat(n0, n0), mat(n1, n1), mat(n1, n0), mat(n0, n1))
