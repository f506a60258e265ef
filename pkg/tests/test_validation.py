import numpy as np
import pytest

from qbm_esd import (CovarianceMatrix, DivergenceError, DomainError, Evolution, KernelSet,
                     MeasurementSpec, PhysicalParams, UnphysicalInputError, duan_verdict, reduce,
                     reference_suite)
from qbm_esd.oracles import (ppt_simon_oracle, pt_symplectic_min, quadrature_kernel_oracle,
                             random_symmetric_state, standard_form, sum_rule_integral, two_mode_squeezed)
from qbm_esd.validation import DEFAULT_REGISTRY, format_reports, relative_errors


def test_oracle_green_at_origin():
    assert quadrature_kernel_oracle(0.0, PhysicalParams(tau=5.0), "G") == 0.0


def test_oracle_ohmic_green():
    v = quadrature_kernel_oracle(2.0, PhysicalParams(), "G")
    assert v == pytest.approx(1 - np.exp(-2.0), rel=1e-9)


def test_oracle_velocity_variance_matches_poles(srt5):
    assert quadrature_kernel_oracle(0.0, srt5.params, "v2") == pytest.approx(srt5.velocity_variance(), rel=1e-6)


def test_oracle_errors():
    with pytest.raises(DivergenceError):
        quadrature_kernel_oracle(0.0, PhysicalParams(), "v2")
    with pytest.raises(DomainError):
        quadrature_kernel_oracle(1.0, PhysicalParams(tau=1.0), "c")
    with pytest.raises(ValueError):
        quadrature_kernel_oracle(1.0, PhysicalParams(tau=1.0), "nope")


def test_sum_rule_integral():
    assert sum_rule_integral(PhysicalParams(m=3.0, tau=0.7, omega0=0.4)) == pytest.approx(1 / 3, rel=1e-8)


def test_ppt_vacuum_and_squeezed():
    assert ppt_simon_oracle(CovarianceMatrix(np.eye(4) / 2))
    assert not ppt_simon_oracle(CovarianceMatrix(standard_form(*two_mode_squeezed(0.5))))


def test_ppt_config_a_initial_state(srt5):
    M = CovarianceMatrix(Evolution(srt5, MeasurementSpec(5.0, 4.0)).matrices(0.0)[0])
    assert not ppt_simon_oracle(M)
    assert not duan_verdict(reduce(M)).separable


def test_ppt_rejects_unphysical():
    with pytest.raises(UnphysicalInputError):
        ppt_simon_oracle(CovarianceMatrix(np.eye(4) / 4))


def test_symplectic_eigenvalue_equals_duan_lhs(rng):
    for _ in range(200):
        M, _ = random_symmetric_state(rng)
        assert pt_symplectic_min(M) == pytest.approx(duan_verdict(reduce(M)).lhs, rel=1e-9)


def test_random_states_cover_both_classes(rng):
    verdicts = {duan_verdict(reduce(random_symmetric_state(rng)[0])).separable for _ in range(200)}
    assert verdicts == {True, False}


def test_relative_errors_floor():
    rel, ab = relative_errors([1.0, 1e-12], [1.0, 0.0])
    assert rel[0] == 0.0 and rel[1] == pytest.approx(1e-4)
    assert ab[1] == 1e-12


@pytest.fixture(scope="module")
def default_reports():
    return reference_suite()


def test_default_suite_passes(default_reports):
    assert sorted(r.name for r in default_reports) == sorted(DEFAULT_REGISTRY)
    failed = [r for r in default_reports if not r.passed]
    assert not failed, format_reports(failed)


def test_format_reports(default_reports):
    text = format_reports(default_reports)
    assert all(name in text for name in DEFAULT_REGISTRY)


class _Corrupted(KernelSet):
    def green(self, t):
        G, Gd = super().green(t)
        return 1.01 * G, 1.01 * Gd


def test_corrupted_kernel_fails_sum_rule():
    (report,) = reference_suite({"sum_rule": DEFAULT_REGISTRY["sum_rule"]}, kernel_factory=_Corrupted)
    assert not report.passed
    assert report.max_rel_err == pytest.approx(0.01, rel=1e-6)


def test_empty_registry():
    assert reference_suite({}) == []


def test_crashing_check_is_reported():
    def boom(ctx):
        raise RuntimeError("kaput")

    (report,) = reference_suite({"boom": boom})
    assert not report.passed and "kaput" in report.name


def test_seeded_checks_are_reproducible():
    reg = {"two_mode_squeezed": DEFAULT_REGISTRY["two_mode_squeezed"],
           "covariance_paths": DEFAULT_REGISTRY["covariance_paths"]}
    assert reference_suite(reg, seed=7) == reference_suite(reg, seed=7)
