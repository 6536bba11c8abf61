import pytest

from bicbf import kernels

ACCEPTANCE_LINES = []


@pytest.fixture(params=list(kernels.available_backends()))
def backend(request, monkeypatch):
    """Run a test once per available kernel backend, patched in as active."""
    mod = kernels.get_backend(request.param)
    monkeypatch.setattr(kernels, "anova_ss", mod.anova_ss)
    monkeypatch.setattr(kernels, "anova_ss_batch", mod.anova_ss_batch)
    return mod


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
