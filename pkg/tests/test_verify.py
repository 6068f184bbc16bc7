from __future__ import annotations

from urnlab.verify import check_oracle_equality, corrupt, default_grid, run_suites


def test_default_grid_covers_all_classes():
    classes = {spec.urn_class.value for spec in default_grid().values()}
    assert {"Small", "Critical", "Large", "Triangular", "Polya"} <= classes
    models = {spec.sampling.value for spec in default_grid().values()}
    assert models == {"M", "R"}


def test_suites_pass():
    report = run_suites()
    assert report.passed, report.failures


def test_corrupted_coefficient_is_caught():
    report = run_suites(suites=["oracle"], f=corrupt((3, 2, 2)))
    assert not report.passed
    assert all(r.name == "oracle" for r in report.failures)


def test_oracle_size_limit_reported():
    report = run_suites(suites=["oracle"], n=80)
    assert report.failures and all("SizeLimit" in r.detail for r in report.failures)


def test_single_check(large_r):
    ok, detail = check_oracle_equality(large_r, 4, 3)
    assert ok and detail
