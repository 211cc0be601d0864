import pytest

_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of an acceptance criterion under the given label."""
    label = request.node.get_closest_marker("criterion").args[0]
    _CRITERIA[label] = (False, "did not finish")

    def done(detail=""):
        _CRITERIA[label] = (True, detail)

    return done


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: (len(s.split()[0]), s)):
        ok, detail = _CRITERIA[label]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
