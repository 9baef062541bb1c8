import numpy as np
import pytest

from zenocfc import _fallback

try:
    from zenocfc import _kernels
except ImportError:  # extension not built
    _kernels = None

KERNEL_MODULES = [pytest.param(_fallback, id="python")]
if _kernels is not None:
    KERNEL_MODULES.append(pytest.param(_kernels, id="compiled"))


@pytest.fixture(params=KERNEL_MODULES)
def kernels(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance check for the terminal summary."""
    import time

    state = {"label": request.node.name, "detail": ""}

    def describe(label, detail=""):
        state["label"], state["detail"] = label, detail

    start = time.perf_counter()
    yield describe
    elapsed = time.perf_counter() - start
    failed = getattr(request.node, "rep_call", None) is None or request.node.rep_call.failed
    status = "FAIL" if failed else "PASS"
    ACCEPTANCE_LINES.append(f"[{status}] {state['label']} ({elapsed:.2f}s) {state['detail']}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
