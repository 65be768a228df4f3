import sys
from pathlib import Path

import pytest

from quantasp.textio import parse

CORPUS = Path(__file__).parent / "corpus"


@pytest.fixture
def corpus():
    return CORPUS


def load(name: str):
    return parse((CORPUS / name).read_text())


def pytest_terminal_summary(terminalreporter):
    mod = next((m for n, m in sys.modules.items() if n.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
