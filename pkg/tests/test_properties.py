import math
import warnings

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from vacbir.constants import CODATA2018, xi_constant, xi_from_alpha
from vacbir.errors import TruncationWarning
from vacbir.fock_oracle import TRUNCATION_GATE, MZIPropagator, Observable, input_state, truncation_error
from vacbir.qed_phase import ProbeBeam, PumpLaser, qed_phase_shift, qed_phase_shift_via_index, refraction_index_excess
from vacbir.sensitivity import (
    CoherentSqueezedVacuum,
    DetectionScheme,
    SqueezerConfig,
    coherent_sensitivity,
    csv_optimal_phase,
    csv_sensitivity,
    csv_single_detector_optimum,
    difference_moments,
    lossy_csv,
    lossy_sql,
    quadrature_variance_spectrum,
    repeated_measurements,
    single_detector_moments,
    squeezing_db_to_r,
    squeezing_r_to_db,
    csv_high_power_approx,
    sql_bound,
)

DIFF, SINGLE = DetectionScheme.DIFFERENCE, DetectionScheme.SINGLE
fields = st.floats(1e8, 1e17)
alphas = st.floats(0.05, 1e4)
squeezes = st.floats(0.0, 3.0)
phases = st.floats(0.01, 2 * math.pi - 0.01)


@given(st.floats(0.5, 2.0), st.floats(0.5, 2.0), st.floats(0.5, 2.0))
def test_xi_forms_agree_for_any_constants(se, sm, sc):
    k = CODATA2018.with_values(e=CODATA2018.e * se, m_e=CODATA2018.m_e * sm, c=CODATA2018.c * sc)
    assert xi_constant(k) == pytest.approx(xi_from_alpha(k), rel=1e-12)


@given(fields)
def test_index_ratio_is_seven_fourths(E):
    d_par, d_perp = refraction_index_excess(E)
    assert d_perp / d_par == pytest.approx(1.75, rel=1e-12)


@given(fields, st.floats(1e-6, 2e-5), st.sampled_from(["parallel", "perpendicular"]))
def test_phase_routes_and_scaling(E, w0, pol):
    probe = ProbeBeam(polarization=pol)
    a = qed_phase_shift(PumpLaser("p", E, 1e-14, w0=w0), probe)
    assert a == pytest.approx(qed_phase_shift_via_index(PumpLaser("p", E, 1e-14, w0=w0), probe), rel=1e-12)
    assume(2 * E < 1e18)
    assert qed_phase_shift(PumpLaser("p", 2 * E, 1e-14, w0=w0), probe) / a == pytest.approx(4.0, rel=1e-12)


@given(alphas, phases, st.sampled_from([DIFF, SINGLE]), st.floats(0, math.pi))
def test_csv_reduces_to_coherent(alpha, phi, scheme, theta):
    s = abs(math.sin(phi)) if scheme is DIFF else abs(math.sin(phi / 2))
    assume(s > 1e-6)
    assert csv_sensitivity(alpha, theta, 0.0, phi, scheme) == pytest.approx(
        coherent_sensitivity(alpha, phi, scheme), rel=1e-12
    )


@given(alphas, squeezes, phases, st.floats(0, math.pi), st.sampled_from([DIFF, SINGLE]))
def test_csv_matches_moment_definition(alpha, r, phi, theta, scheme):
    assume(abs(alpha**2 - math.sinh(r) ** 2) > 1e-3 * max(alpha**2, math.sinh(r) ** 2))
    assume(abs(math.sin(phi)) > 1e-3)
    fn = difference_moments if scheme is DIFF else single_detector_moments
    _, var, slope = fn(alpha, theta, r, phi)
    value = csv_sensitivity(alpha, theta, r, phi, scheme)
    assert value > 0
    assert value == pytest.approx(math.sqrt(var) / abs(slope), rel=1e-9)


@given(st.floats(0.05, 1e3), st.floats(0.01, 3.0), st.floats(1e-4, 0.05))
def test_optimal_phase_is_local_minimum(alpha, r, step):
    assume(abs(alpha**2 - math.sinh(r) ** 2) > 1e-3 * max(alpha**2, math.sinh(r) ** 2))
    phi, finite = csv_optimal_phase(alpha, r)
    assert finite and 0 < phi < math.pi
    best = csv_single_detector_optimum(alpha, r)
    assert csv_sensitivity(alpha, 0.0, r, phi, SINGLE) == pytest.approx(best, rel=1e-9)
    for p in (phi - step, phi + step):
        if 0 < p < math.pi:
            assert csv_sensitivity(alpha, 0.0, r, p, SINGLE) >= best * (1 - 1e-12)


@given(alphas, squeezes, st.integers(1, 10**6))
def test_loss_free_and_repetition_identities(alpha, r, n):
    assert lossy_sql(alpha, 0.0) == pytest.approx(sql_bound(alpha**2), rel=1e-12)
    assert lossy_csv(alpha, r, 0.0) == pytest.approx(csv_high_power_approx(alpha, r), rel=1e-12)
    v = csv_high_power_approx(alpha, r)
    assert repeated_measurements(v, n) == pytest.approx(v / math.sqrt(n), rel=1e-15)
    assert repeated_measurements(v, 1) == v


@given(st.floats(0, 0.999), st.floats(0, 1), st.floats(0, 1e9))
def test_spectrum_uncertainty_product(p, eta, omega):
    cfg = SqueezerConfig(p=p, eta_d=eta)
    anti, sq = quadrature_variance_spectrum(cfg, omega)
    x = omega / cfg.linewidth
    d_plus = (1 - math.sqrt(p)) ** 2 + x**2
    d_minus = (1 + math.sqrt(p)) ** 2 + x**2
    expected = 1 + 16 * p * eta * (1 - eta) / (d_plus * d_minus)
    assert anti * sq == pytest.approx(expected, rel=1e-12)
    assert anti * sq >= 1 - 1e-12


@given(st.floats(0, 200))
def test_db_round_trip(db):
    assert squeezing_r_to_db(squeezing_db_to_r(db)) == pytest.approx(db, rel=1e-14, abs=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 2.0), st.floats(0.0, 0.5), st.floats(0, math.pi), st.floats(0.05, 3.1))
def test_oracle_conserves_photons_and_matches_moments(alpha, r, theta, phi):
    spec = CoherentSqueezedVacuum(alpha, r, theta)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        state = input_state(spec, 30)
    assume(truncation_error(state) < TRUNCATION_GATE)
    prop = MZIPropagator(state)
    stats = prop.stats(phi)
    out = prop.state(phi)
    assert out.norm() == pytest.approx(1.0, abs=1e-12)
    assert sum(out.mode_means()) == pytest.approx(spec.mean_photons, abs=1e-8)
    for obs, fn in ((Observable.N_D, difference_moments), (Observable.N_4, single_detector_moments)):
        mean, var, _ = fn(alpha, theta, r, phi)
        assert stats[obs][0] == pytest.approx(mean, rel=1e-6, abs=1e-9)
        assert stats[obs][1] == pytest.approx(var, rel=1e-6, abs=1e-9)
