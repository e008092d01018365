import pytest

ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


@pytest.fixture
def report(request):
    """Collect one PASS/FAIL line for an acceptance criterion; extra details go in the dict."""
    detail = {}
    yield detail
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    name = request.node.name.removeprefix("test_")
    extra = ", ".join(f"{k}={v}" for k, v in detail.items())
    line = f"{name.split('_')[0].upper()} {'PASS' if ok else 'FAIL'}  {name}" + (f"  ({extra})" if extra else "")
    request.config.stash[ACCEPTANCE].append(line)


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash[ACCEPTANCE]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
