import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbm_esd import (CovarianceMatrix, DomainError, ExponentEvaluator, KernelSet, MeasurementSpec,
                     NonQuadraticError, PhysicalParams, StructureError, UnitsSpec, assemble,
                     assemble_free, exponent_eval, extract_covariance, initial_covariance, make_exponent)
from qbm_esd.covariance import free_block_dets
from qbm_esd.duan import block_invariants

SPEC_A = MeasurementSpec(5.0, 4.0)
SPEC_B = MeasurementSpec(5000.0, 4999.0)


def test_spec_validation():
    with pytest.raises(DomainError):
        MeasurementSpec(5.0, 6.0)
    with pytest.raises(DomainError):
        MeasurementSpec(5.0, 5.0)
    with pytest.raises(DomainError):
        MeasurementSpec(-1.0, 0.0)


def test_spec_from_dimensionless_scales_by_zeta_over_hbar():
    spec = MeasurementSpec.from_dimensionless(5, 4, params=PhysicalParams(zeta=2.0, hbar=4.0))
    assert spec.a11 == 2.5 and spec.a12 == 2.0
    assert spec.b11 == 5


def test_near_degenerate_det_is_exact():
    assert SPEC_B.det == 9999.0
    assert SPEC_B.b11 == 5000.0 and SPEC_B.b12 == 4999.0


def test_units_natural():
    assert UnitsSpec.natural(PhysicalParams(zeta=4.0, hbar=1.0)).L == 0.5
    with pytest.raises(DomainError):
        UnitsSpec(0.0)


def test_covariance_matrix_checks():
    with pytest.raises(StructureError):
        CovarianceMatrix(np.eye(3))
    bad = np.eye(4)
    bad[0, 1] = 1e-3
    with pytest.raises(StructureError):
        CovarianceMatrix(bad)
    M = CovarianceMatrix(np.eye(4))
    with pytest.raises(ValueError):
        M.entries[0, 0] = 2.0


def test_exponent_at_origin(srt5):
    assert exponent_eval(np.zeros(4), 3.0, srt5, SPEC_A) == 0.0


def test_exponent_swap_symmetry(srt5, rng):
    e = make_exponent(2.0, srt5, SPEC_A)
    for _ in range(10):
        P1, Q1, P2, Q2 = rng.normal(size=4)
        assert e((P1, Q1, P2, Q2)) == pytest.approx(e((P2, Q2, P1, Q1)), rel=1e-14)


def test_exponent_at_zero_matches_initial_form(srt5, rng):
    v2 = srt5.velocity_variance()
    a11, a12, a22 = SPEC_A.a11, SPEC_A.a12, SPEC_A.a22
    det = SPEC_A.det
    for _ in range(5):
        P1, Q1, P2, Q2 = rng.normal(size=4)
        ref = -(a22 * P1**2 - 2 * a12 * P1 * P2 + a11 * P2**2) / (2 * det)
        ref -= (a11 * Q1**2 + 2 * a12 * Q1 * Q2 + a22 * Q2**2) / 8 + v2 * (Q1**2 + Q2**2) / 2
        assert exponent_eval((P1, Q1, P2, Q2), 0.0, srt5, SPEC_A) == pytest.approx(ref, rel=1e-13)


def test_extract_diagonal_exponent():
    d = np.array([1.0, 2.0, 3.0, 4.0])
    e = lambda x: -0.5 * float(np.sum(d * np.asarray(x) ** 2))
    np.testing.assert_allclose(extract_covariance(e, UnitsSpec(), hbar=1.0).entries, np.diag(d), rtol=1e-15)


def test_extract_rejects_non_quadratic():
    with pytest.raises(NonQuadraticError):
        extract_covariance(lambda x: -float(np.sum(np.asarray(x) ** 4)), UnitsSpec(), hbar=1.0)
    with pytest.raises(NonQuadraticError):
        extract_covariance(lambda x: -float(np.sum(np.asarray(x) ** 2)) + 0.3 * x[0], UnitsSpec(), hbar=1.0)


def test_initial_entries_config_a(srt5):
    M = assemble_free(0.0, srt5, SPEC_A, UnitsSpec()).entries
    assert M[0, 0] == pytest.approx(5 / 9, rel=1e-15)
    assert M[0, 1] == 0.0
    assert M[0, 2] == pytest.approx(-4 / 9, rel=1e-15)
    assert M[0, 3] == 0.0  # C12
    # the a12 x1 x2 term of the measurement puts a12 / 4 into C22
    assert M[1, 3] == pytest.approx(1.0, rel=1e-15)
    assert M[1, 1] == pytest.approx(srt5.velocity_variance() + 5 / 4, rel=1e-15)


def test_initial_covariance_p1_coefficient():
    M = initial_covariance(SPEC_A, 0.2, UnitsSpec()).entries
    assert M[0, 0] == pytest.approx(5 / 9, rel=1e-15)


def test_initial_covariance_product_state():
    M = CovarianceMatrix(initial_covariance(MeasurementSpec(3.0, 0.0), 0.4, UnitsSpec()).entries)
    assert np.all(M.Cblock == 0)
    np.testing.assert_array_equal(M.Gblock, M.entries[2:, 2:])


def test_initial_covariance_asymmetric():
    spec = MeasurementSpec(3.0, 1.0, 5.0)
    M = initial_covariance(spec, 0.1, UnitsSpec()).entries
    inv = np.linalg.inv([[3.0, 1.0], [1.0, 5.0]])
    assert M[0, 0] == pytest.approx(inv[0, 0]) and M[2, 2] == pytest.approx(inv[1, 1])
    assert M[0, 2] == pytest.approx(inv[0, 1])


@pytest.mark.parametrize("spec", [SPEC_A, SPEC_B])
def test_initial_two_paths(srt5, spec):
    a = assemble_free(0.0, srt5, spec, UnitsSpec()).entries
    b = initial_covariance(spec, srt5.velocity_variance(), UnitsSpec()).entries
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))


@pytest.mark.parametrize("t", [1.0, 4.0, 13.0])
def test_polarization_equals_closed_form(srt5, t):
    u = UnitsSpec(0.7)
    a = assemble_free(t, srt5, SPEC_A, u).entries
    b = extract_covariance(make_exponent(t, srt5, SPEC_A), u).entries
    assert np.max(np.abs(a - b)) <= 1e-10 * np.max(np.abs(a))


def test_l_rescaling_of_entries(srt5):
    M1 = assemble_free(2.0, srt5, SPEC_A, UnitsSpec(1.0)).entries
    M2 = assemble_free(2.0, srt5, SPEC_A, UnitsSpec(2.0)).entries
    for i, j, f in [(0, 0, 0.25), (0, 2, 0.25), (1, 1, 4.0), (1, 3, 4.0), (0, 1, 1.0), (0, 3, 1.0)]:
        assert M2[i, j] == pytest.approx(f * M1[i, j], rel=1e-14)


def test_block_structure_exact(srt02):
    M = CovarianceMatrix(assemble_free(3.3, srt02, SPEC_B, UnitsSpec()).entries)
    assert M.block_defect() == 0.0


def test_assemble_free_rejects_oscillator_and_asymmetric(srt5):
    with pytest.raises(DomainError):
        assemble_free(1.0, KernelSet(PhysicalParams(tau=1.0, omega0=1.0)), SPEC_A, UnitsSpec())
    with pytest.raises(DomainError):
        assemble_free(1.0, srt5, MeasurementSpec(3.0, 1.0, 4.0), UnitsSpec())


def test_oscillator_assembly_is_physical():
    k = KernelSet(PhysicalParams(tau=5.0, omega0=0.7))
    for t in (0.0, 2.0, 10.0):
        M = assemble(t, k, SPEC_A, UnitsSpec())
        assert M.is_physical()
        assert M.block_defect() <= 1e-12 * np.max(np.abs(M.entries))


def test_oscillator_initial_state():
    # a finite equilibrium spread <x^2> narrows the momentum sector to (a + 1/<x^2>)^-1;
    # the position sector is the same as for the free particle
    k = KernelSet(PhysicalParams(tau=5.0, omega0=0.7))
    x2 = k.correlation(0.0)[2]
    M = assemble(0.0, k, SPEC_A, UnitsSpec()).entries
    ref = initial_covariance(SPEC_A, k.velocity_variance(), UnitsSpec()).entries
    a = np.array([[5.0, 4.0], [4.0, 5.0]])
    P = np.linalg.inv(a + np.eye(2) / x2)
    np.testing.assert_allclose(M[np.ix_([0, 2], [0, 2])], P, rtol=1e-10)
    np.testing.assert_allclose(M[np.ix_([1, 3], [1, 3])], ref[np.ix_([1, 3], [1, 3])], rtol=1e-10)


@pytest.mark.parametrize("spec", [SPEC_A, SPEC_B])
def test_structured_dets_match_entries(srt5, spec):
    t = np.array([0.0, 1.0, 7.0, 19.0])
    G, Gd = srt5.green(t)
    s, sd = srt5.msd(t)
    detG, detC, dp, dm = free_block_dets(G, Gd, s, sd, srt5.velocity_variance(), spec)
    for i, tt in enumerate(t):
        e = assemble_free(tt, srt5, spec, UnitsSpec()).entries
        Gb, Cb = e[:2, :2], e[:2, 2:]
        for val, blk in ((detG, Gb), (detC, Cb), (dp, Gb + Cb), (dm, Gb - Cb)):
            ref = np.linalg.det(blk)
            assert val[i] == pytest.approx(ref, rel=1e-8, abs=1e-10 * np.linalg.norm(blk) ** 2)


@pytest.mark.parametrize("L", [0.1, 0.5, 3.0, 10.0])
def test_invariants_independent_of_l(srt5, L):
    base = block_invariants(CovarianceMatrix(assemble_free(5.0, srt5, SPEC_A, UnitsSpec()).entries))
    other = block_invariants(CovarianceMatrix(assemble_free(5.0, srt5, SPEC_A, UnitsSpec(L)).entries))
    np.testing.assert_allclose(other, base, rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(t=st.floats(0.0, 20.0), b11=st.floats(0.3, 3000.0), ratio=st.floats(-0.999, 0.999),
       L=st.floats(0.1, 10.0))
def test_two_paths_property(srt5, t, b11, ratio, L):
    spec, u = MeasurementSpec(b11, ratio * b11), UnitsSpec(L)
    a = assemble_free(t, srt5, spec, u)
    b = extract_covariance(make_exponent(t, srt5, spec), u)
    assert np.max(np.abs(a.entries - b.entries)) <= 1e-10 * np.max(np.abs(a.entries))
    assert a.is_physical()


def test_evaluator_dataclass_is_frozen(srt5):
    e = make_exponent(1.0, srt5, SPEC_A)
    assert isinstance(e, ExponentEvaluator) and e.free
    with pytest.raises(AttributeError):
        e.G = 0.0
