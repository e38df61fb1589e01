import pytest

from jacquetlab.suites import Check, guarded, run_suite


def test_guarded_turns_exceptions_into_failures():
    c = guarded("boom", lambda: 1 / 0)
    assert not c.passed and c.details.startswith("ZeroDivisionError")
    assert guarded("fine", lambda: (True, "ok")) == Check("fine", True, "ok")


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope", ["1/2"])


def test_casimir_suite_passes():
    checks = run_suite("casimir", ["1/2", "1"])
    assert checks and all(c.passed for c in checks)
    assert checks[0].to_json()["pass"] is True
