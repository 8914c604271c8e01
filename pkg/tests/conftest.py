import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from optocluster.model import SystemParams  # noqa: E402

OMEGA_BAR = 2 * np.pi * 10e6
KAPPA = 0.02 * OMEGA_BAR

_ACCEPTANCE = {}


def fig_params(n, gamma_over_kappa=5e-6, temperature=0.01, r=2.0, gtilde_over_kappa=0.16, **kw):
    return SystemParams(
        n=n,
        omega_m=OMEGA_BAR * np.arange(1, n + 1),
        kappa=KAPPA,
        gamma=gamma_over_kappa * KAPPA,
        temperature=temperature,
        g_tilde=gtilde_over_kappa * KAPPA,
        r=r,
        **kw,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = ""
        if report.failed and call.excinfo is not None:
            detail = f" :: {call.excinfo.typename}: {str(call.excinfo.value).splitlines()[0][:160]}"
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        _ACCEPTANCE[number] = f"[{status}] criterion {number}: {title}{detail}"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
