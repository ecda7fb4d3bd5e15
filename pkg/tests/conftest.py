import string

import pytest

from streamepi.events import Event


def seq(text):
    """Events from ``"A B C"`` (timestamps 1, 2, ...) or ``"A@0.5 B@2"``."""
    out = []
    for i, tok in enumerate(text.split(), start=1):
        name, _, t = tok.partition("@")
        out.append(Event(string.ascii_uppercase.index(name), float(t) if t else float(i)))
    return out


def ep(text):
    """Episode from ``"ABC"``."""
    return tuple(string.ascii_uppercase.index(c) for c in text)


@pytest.fixture
def acceptance_log(request):
    """Lines collected here are repeated in the terminal summary."""
    lines = getattr(request.config, "_acceptance_lines", None)
    if lines is None:
        lines = request.config._acceptance_lines = []
    return lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
