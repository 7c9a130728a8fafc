import pytest

_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_KEY] = []


@pytest.fixture
def acceptance(request):
    """Record one acceptance line: ``acceptance(tag, ok, detail)``."""
    lines = request.config.stash[_KEY]

    def record(tag, ok, detail=""):
        lines.append(f"{'PASS' if ok else 'FAIL'}  {tag}  {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
