import pytest

from wavetm.acceptance import (
  FIXTURE_NAMES,
  AcceptanceReport,
  CheckResult,
  check_barrier_closed_form,
  check_classifier,
  check_closed_form_born,
  check_composition,
  check_diagnostics,
  check_double_delta,
  check_exponential_second_order,
  check_properties,
  check_unit_determinant,
  load_fixtures,
  run_acceptance,
)
from wavetm.errors import InputError


def test_every_fixture_is_shipped(specs) -> None:
  assert sorted(specs) == sorted(FIXTURE_NAMES)


def test_missing_fixture_directory(tmp_path) -> None:
  with pytest.raises(InputError):
    load_fixtures(tmp_path)


@pytest.mark.parametrize(
  'check',
  [
    check_unit_determinant,
    check_barrier_closed_form,
    check_composition,
    check_double_delta,
    check_closed_form_born,
    check_exponential_second_order,
    check_classifier,
    check_diagnostics,
    check_properties,
  ],
)
def test_check_passes(specs, check) -> None:
  result = check(specs)
  assert result.passed, result.detail


def test_report_fails_when_any_check_fails() -> None:
  good = CheckResult(name='a', passed=True)
  bad = CheckResult(name='b', passed=False, detail='off')
  assert AcceptanceReport(checks=[good]).passed
  report = AcceptanceReport(checks=[good, bad])
  assert not report.passed
  assert report.to_json()['checks'][1]['detail'] == 'off'


@pytest.mark.slow
def test_full_acceptance_run(specs) -> None:
  report = run_acceptance(specs)
  assert report.passed, [c.detail for c in report.checks if not c.passed]
