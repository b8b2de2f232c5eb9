from importlib import resources

import pytest
from hypothesis import settings

from hornets.modelfile import parse_model

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def bundled(name: str) -> str:
    return (resources.files("hornets") / "models" / f"{name}.hornet").read_text(encoding="utf-8")


@pytest.fixture
def fig2():
    return parse_model(bundled("fig2"))


@pytest.fixture
def fig3():
    return parse_model(bundled("fig3"))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
