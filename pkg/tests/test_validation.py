import pytest

from config import load_config
from validation import CheckResult, InvariantSuite, format_report


@pytest.fixture
def suite(fast_cfg):
    return InvariantSuite(fast_cfg)


@pytest.mark.parametrize("check", ["band_arithmetic", "fft_against_dft", "wigner_against_oracle",
                                   "purity_against_oracle", "oracle_sensitivity", "resolution_guard"])
def test_check_passes(suite, check):
    result = getattr(suite, check)()
    assert result.name == check
    assert result.passed, result.detail


def test_solver_comparison_reports(suite):
    result = suite.solver_oracle()
    assert result.name == "solver_oracle"
    assert "K points" in result.detail


def test_report():
    report = format_report([CheckResult("band_arithmetic", True, "fine"), CheckResult("solver", False, "drift")])
    lines = report.splitlines()
    assert lines[0].split() == ["check", "status", "detail"]
    assert "FAIL" in lines[3]
    assert lines[-1] == "1/2 checks passed"


@pytest.mark.slow
def test_default_config_passes_every_check():
    results = InvariantSuite(load_config(None)).run()
    assert all(result.passed for result in results), format_report(results)
