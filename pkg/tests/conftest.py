import pytest

from eraserlab import _core, _kernels_py

try:
    from eraserlab import _kernels as _compiled
except ImportError:
    _compiled = None

KERNEL_MODULES = {"python": _kernels_py}
if _compiled is not None:
    KERNEL_MODULES["cython"] = _compiled

KERNEL_NAMES = ("enumerate_paths", "sample_paths", "spinlabor_counts", "bernoulli_pmf")

# (label, passed, detail) rows filled by test_acceptance
ACCEPTANCE = []


@pytest.fixture(params=sorted(KERNEL_MODULES))
def kernels(request):
    return KERNEL_MODULES[request.param]


@pytest.fixture(params=sorted(KERNEL_MODULES))
def backend(request, monkeypatch):
    """Route the library through one kernel backend for the duration of a test."""
    mod = KERNEL_MODULES[request.param]
    for name in KERNEL_NAMES:
        monkeypatch.setattr(_core, name, getattr(mod, name))
    return request.param


@pytest.fixture
def acceptance():
    def record(label, passed, detail=""):
        ACCEPTANCE.append((label, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
