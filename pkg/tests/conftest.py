import sys
from pathlib import Path

import pytest

from padicforms.forms import Form

DATA = Path(__file__).parent / "data"

# criterion number -> (description, "PASS"/"FAIL"), filled by test_acceptance
ACCEPTANCE: dict = {}


def diag(p, d, coeffs):
    n = len(coeffs)
    return Form.build(p, n, d, {tuple(d if j == i else 0 for j in range(n)): c for i, c in enumerate(coeffs)})


@pytest.fixture
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        desc, status = ACCEPTANCE[key]
        terminalreporter.write_line(f"{status} criterion {key}: {desc}")


sys.path.insert(0, str(Path(__file__).parent))
