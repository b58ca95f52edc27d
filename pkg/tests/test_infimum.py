from __future__ import annotations

import math

import numpy as np
import pytest

from qid_lab.catalog import catalog_names, catalog_spec
from qid_lab.charfn import Part, eval_grid
from qid_lab.config import LabConfig
from qid_lab.errors import BudgetExhaustedError, SpecError, SpecFormatError
from qid_lab.infimum import (
    ConditionReport,
    InfCertificate,
    Mode,
    PeriodDomain,
    Target,
    Verdict,
    WindowDomain,
    certify_inf,
    check_conditions,
    estimate_mu,
    estimate_mu_d,
)

CONTINUOUS_ONLY = ("gaussian", "uniform", "exponential", "laplace", "cantor", "cantor_plus_exponential")


@pytest.fixture(scope="module")
def catalog_reports() -> dict[str, ConditionReport]:
    return {name: check_conditions(catalog_spec(name)) for name in catalog_names()}


def _bernoulli_modulus(t: np.ndarray) -> np.ndarray:
    return np.abs(0.75 + 0.25 * np.exp(1j * t))


def test_certify_inf_bernoulli_period() -> None:
    certificate = certify_inf(_bernoulli_modulus, 0.25, PeriodDomain(2.0 * math.pi), 1e-6)

    assert certificate.mode is Mode.EXACT_PERIOD
    assert certificate.lower_bound <= certificate.upper_bound
    assert certificate.lower_bound == pytest.approx(0.5, abs=1e-6)
    assert certificate.upper_bound == pytest.approx(0.5, abs=1e-6)
    assert certificate.gap <= 1e-6 + 1e-12
    assert certificate.argmin_t == pytest.approx(math.pi, abs=1e-2)
    assert certificate.certified_positive
    assert certificate.global_lower_bound == certificate.lower_bound


def test_certified_lower_bound_holds_on_dense_scan() -> None:
    certificate = certify_inf(_bernoulli_modulus, 0.25, PeriodDomain(2.0 * math.pi), 1e-6)
    t = np.arange(0.0, 2.0 * math.pi, 1e-3)

    assert _bernoulli_modulus(t).min() >= certificate.lower_bound - 1e-12


def test_certify_inf_constant_modulus() -> None:
    certificate = certify_inf(lambda t: np.ones_like(t), 0.0, WindowDomain(50.0), 1e-6)

    assert certificate.lower_bound == certificate.upper_bound == 1.0
    assert certificate.nodes == 1


def test_certify_inf_stops_once_incumbent_reaches_tolerance() -> None:
    certificate = certify_inf(lambda t: np.abs(np.cos(t)), 1.0, WindowDomain(10.0), 1e-6)

    assert certificate.upper_bound <= 1e-6
    assert abs(math.cos(certificate.argmin_t)) <= 1e-6
    assert certificate.lower_bound == 0.0
    assert certificate.zero_hit


def test_minimum_above_zero_threshold_is_separated_by_tighter_tol() -> None:
    certificate = certify_inf(lambda t: np.abs(t - 3.0) + 4e-7, 1.0, WindowDomain(10.0), 1e-6)

    assert certificate.certified_positive
    assert not certificate.zero_hit
    assert certificate.tol < 1e-6
    assert 1e-9 < certificate.lower_bound <= 4e-7
    assert certificate.upper_bound == pytest.approx(4e-7, abs=1e-7)


def test_minimum_below_zero_threshold_is_a_zero_hit() -> None:
    certificate = certify_inf(lambda t: np.abs(t - 3.0) + 5e-10, 1.0, WindowDomain(10.0), 1e-6)

    assert certificate.zero_hit
    assert certificate.upper_bound < 1e-9
    assert not certificate.certified_positive
    assert certificate.argmin_t == pytest.approx(3.0, abs=1e-9)


def test_certify_inf_ties_prefer_smallest_t() -> None:
    def plateau(t: np.ndarray) -> np.ndarray:
        return np.maximum(np.abs(t - 5.0), 1.0)

    certificate = certify_inf(plateau, 1.0, WindowDomain(20.0), 0.1)

    assert certificate.upper_bound == 1.0
    assert 4.0 <= certificate.argmin_t < 4.02


def test_certify_inf_budget_exhausted_carries_partial_certificate() -> None:
    with pytest.raises(BudgetExhaustedError) as raised:
        certify_inf(lambda t: 1.5 + np.cos(t), 1.0, WindowDomain(100.0), 1e-9, node_cap=1024)

    certificate = raised.value.certificate
    assert isinstance(certificate, InfCertificate)
    assert certificate.status == "budget_exhausted"
    assert 0.0 <= certificate.lower_bound <= certificate.upper_bound
    assert certificate.lower_bound <= 0.5 + 1e-12
    assert certificate.upper_bound >= 0.5


def test_certify_inf_rejects_bad_arguments() -> None:
    with pytest.raises(ValueError):
        certify_inf(_bernoulli_modulus, -1.0, PeriodDomain(1.0), 1e-6)
    with pytest.raises(ValueError):
        certify_inf(_bernoulli_modulus, 1.0, PeriodDomain(1.0), 0.0)


def test_mu_d_bernoulli_quarter() -> None:
    certificate = estimate_mu_d(catalog_spec("bernoulli_025"))

    assert certificate.target is Target.D
    assert certificate.lattice is True
    assert certificate.period == pytest.approx(2.0 * math.pi)
    assert certificate.lower_bound == pytest.approx(0.5, abs=1e-6)


def test_mu_d_bernoulli_half_hits_zero() -> None:
    certificate = estimate_mu_d(catalog_spec("bernoulli_050"))

    assert certificate.zero_hit
    assert certificate.upper_bound < 1e-9
    assert not certificate.certified_positive


def test_mu_d_degenerate_atom() -> None:
    certificate = estimate_mu_d(catalog_spec("degenerate_atom"))

    assert certificate.lower_bound == certificate.upper_bound == 1.0


def test_mu_d_nonlattice_is_window_only() -> None:
    certificate = estimate_mu_d(catalog_spec("nonlattice_sqrt2"), ladder=(100.0, 1000.0))

    assert certificate.mode is Mode.WINDOW
    assert certificate.lattice is False
    assert certificate.global_lower_bound is None
    assert any("non-lattice" in note for note in certificate.notes)
    uppers = [step["upper_bound"] for step in certificate.ladder]
    assert uppers == sorted(uppers, reverse=True)


def test_mu_d_nonlattice_default_ladder_separates_small_minimum() -> None:
    certificate = estimate_mu_d(catalog_spec("nonlattice_sqrt2"))

    assert certificate.window_T == 10000.0
    assert certificate.upper_bound < 1e-6
    assert not certificate.zero_hit
    assert certificate.certified_positive
    assert certificate.lower_bound <= certificate.upper_bound


@pytest.mark.parametrize("name", [name for name in catalog_names() if catalog_spec(name).is_lattice])
def test_period_certificate_matches_sampled_infimum(name: str) -> None:
    spec = catalog_spec(name)
    certificate = estimate_mu_d(spec)
    period = certificate.period
    assert period is not None
    t, spacing = np.linspace(-10.0 * period, 10.0 * period, 400_001, retstep=True)

    sampled = float(np.abs(eval_grid(spec, Part.D, t)).min())

    assert certificate.mode is Mode.EXACT_PERIOD
    assert sampled >= certificate.lower_bound - 1e-12
    assert sampled <= certificate.upper_bound + certificate.lipschitz_L * spacing / 2.0 + 1e-12
    assert certificate.upper_bound - certificate.lower_bound <= certificate.tol + 1e-12


def test_mu_d_requires_discrete_part() -> None:
    with pytest.raises(SpecError):
        estimate_mu_d(catalog_spec("gaussian"))


def test_mu_mixed_spec_is_certified() -> None:
    certificate = estimate_mu(catalog_spec("mixed_bernoulli_gaussian"))

    assert certificate.asymptotic_status == "valid_beyond_T"
    assert certificate.window_T == 1000.0
    assert certificate.global_lower_bound is not None
    assert certificate.global_lower_bound >= 0.29
    assert [step["T"] for step in certificate.ladder] == [10.0, 100.0, 1000.0]


def test_mu_gaussian_hits_zero() -> None:
    certificate = estimate_mu(catalog_spec("gaussian"))

    assert certificate.zero_hit
    assert certificate.asymptotic_status == "inconclusive"


def test_certificate_round_trip() -> None:
    certificate = estimate_mu(catalog_spec("mass_over_half_gaussian"))

    restored = InfCertificate.from_dict(certificate.to_dict())

    assert restored == certificate
    assert "mu = inf|f|" in certificate.summary()
    with pytest.raises(SpecFormatError):
        InfCertificate.from_dict({"target": "full"})


def test_check_mixed_is_member(catalog_reports: dict[str, ConditionReport]) -> None:
    report = catalog_reports["mixed_bernoulli_gaussian"]

    assert report.verdict is Verdict.MEMBER_BY_CRITERION
    assert report.tier == "zero_free_no_singular"
    assert report.cond1_zero_free["status"] == "holds_on_window"
    assert report.cond2_mu_d_positive is True
    assert report.cond3_mu_positive is True


def test_check_mass_over_half(catalog_reports: dict[str, ConditionReport]) -> None:
    report = catalog_reports["mass_over_half_gaussian"]

    assert report.mass_over_half
    assert report.verdict is Verdict.MEMBER_BY_CRITERION
    assert report.tier == "mass_over_half"


def test_check_dominated_and_boundary_singular(catalog_reports: dict[str, ConditionReport]) -> None:
    dominated = catalog_reports["dominated_cantor"]
    boundary = catalog_reports["boundary_cantor"]

    assert dominated.dominated_singular
    assert dominated.verdict is Verdict.MEMBER_BY_CRITERION
    assert dominated.tier == "dominated_singular"
    assert not boundary.dominated_singular
    assert boundary.verdict is Verdict.NECESSARY_HOLD_SUFFICIENCY_UNKNOWN


def test_check_zero_of_discrete_part_fails(catalog_reports: dict[str, ConditionReport]) -> None:
    report = catalog_reports["bernoulli_050"]

    assert report.cond2_mu_d_positive is False
    assert report.cond3_mu_positive is False
    assert report.verdict is Verdict.NECESSARY_CONDITIONS_FAIL


def test_check_gaussian_notes_scope(catalog_reports: dict[str, ConditionReport]) -> None:
    report = catalog_reports["gaussian"]

    assert report.verdict is Verdict.NECESSARY_CONDITIONS_FAIL
    assert report.cond2_mu_d_positive is None
    assert any("c_d = 0, cond3 fails" in note for note in report.notes)


def test_check_nonlattice_is_not_decided(catalog_reports: dict[str, ConditionReport]) -> None:
    report = catalog_reports["nonlattice_sqrt2"]

    assert report.verdict is Verdict.NECESSARY_HOLD_SUFFICIENCY_UNKNOWN
    assert report.cond3_mu_positive is None
    assert report.cond2_mu_d_positive is not False
    assert report.cond1_zero_free["status"] != "violated_at"


@pytest.mark.parametrize("name", CONTINUOUS_ONLY)
def test_without_discrete_part_modulus_approaches_zero(
    catalog_reports: dict[str, ConditionReport], name: str
) -> None:
    certificate = catalog_reports[name].cond3_certificate

    assert certificate is not None
    assert certificate.window_T == 1000.0
    assert certificate.upper_bound < 0.05
    assert catalog_reports[name].cond3_mu_positive is False


def test_separation_from_zero_implies_discrete_separation(catalog_reports: dict[str, ConditionReport]) -> None:
    checked = 0
    for name, report in catalog_reports.items():
        certificate = report.cond3_certificate
        assert certificate is not None
        global_lower = certificate.global_lower_bound
        if global_lower is None or global_lower <= 1e-9:
            continue
        spec = catalog_spec(name)
        assert spec.c_d > 0, name
        assert report.cond2_mu_d_positive is True, name
        assert report.cond2_certificate is not None
        assert report.cond2_certificate.lower_bound > 0.0, name
        checked += 1
    assert checked >= 5


def test_report_round_trip(catalog_reports: dict[str, ConditionReport]) -> None:
    report = catalog_reports["dominated_cantor"]

    restored = ConditionReport.from_dict(report.to_dict())

    assert restored == report
    assert "verdict: member_by_criterion (dominated_singular)" in report.summary()


def test_certified_window_bound_holds_on_dense_scan(catalog_reports: dict[str, ConditionReport]) -> None:
    spec = catalog_spec("dominated_cantor")
    certificate = catalog_reports["dominated_cantor"].cond3_certificate
    t = np.arange(0.0, 50.0, 1e-3)

    assert certificate is not None
    assert np.abs(eval_grid(spec, Part.FULL, t)).min() >= certificate.lower_bound - 1e-12


def test_tolerance_from_config() -> None:
    config = LabConfig(tol=1e-3)

    certificate = estimate_mu_d(catalog_spec("bernoulli_025"), config=config)

    assert certificate.tol == 1e-3
    assert certificate.lower_bound >= 0.5 - 1e-3 - 1e-12
