import json
import math
import warnings

import numpy as np
import pytest

from vacbir.errors import DomainError, SingularPhaseError, TruncationWarning
from vacbir.fock_oracle import (
    TRUNCATION_GATE,
    MZIPropagator,
    Observable,
    TwoModeFockState,
    adequate_n_max,
    coherent_fock,
    displaced_squeezed_fock,
    input_state,
    moment_checks,
    mzi_output_state,
    numeric_sensitivity,
    observable_stats,
    squeezed_vacuum_fock,
    truncation_error,
)
from vacbir.sensitivity import (
    Coherent,
    CoherentSqueezedVacuum,
    DetectionScheme,
    DualSqueezedCoherent,
    csv_optimal_phase,
    csv_single_detector_optimum,
    difference_moments,
)

DIFF, SINGLE = DetectionScheme.DIFFERENCE, DetectionScheme.SINGLE
# sum_m 2m |c_2m|^2 at r = 0.5 and the |4> amplitude, 50-digit mpmath.
SV_MEAN_R05 = 0.27154031740762189
SV_C4_R05 = 0.12315081385423961


def photon_moments(amps):
    p = np.abs(amps) ** 2
    n = np.arange(len(amps))
    mean = p @ n
    return mean, p @ n**2 - mean**2


def vacuum_pair(n_max=5):
    return TwoModeFockState.product(coherent_fock(0, n_max), coherent_fock(0, n_max))


class TestSingleMode:
    def test_coherent_zero_is_vacuum(self):
        amps = coherent_fock(0.0, 10)
        assert amps[0] == 1 and not amps[1:].any()

    def test_coherent_moments(self):
        mean, var = photon_moments(coherent_fock(2.0, 40))
        assert mean == pytest.approx(4.0, abs=1e-10)
        assert var == pytest.approx(4.0, abs=1e-10)

    def test_coherent_phase(self):
        amps = coherent_fock(1.5 * np.exp(0.3j), 30)
        assert np.angle(amps[3]) == pytest.approx(0.9)

    def test_coherent_truncation_warning(self):
        with pytest.warns(TruncationWarning, match="increase n_max"):
            coherent_fock(6.0, 40)

    def test_squeezed_zero_is_vacuum(self):
        amps = squeezed_vacuum_fock(0.0, 10)
        assert amps[0] == pytest.approx(1.0) and np.allclose(amps[1:], 0)

    def test_squeezed_mean(self):
        mean, _ = photon_moments(squeezed_vacuum_fock(0.5, 40))
        assert mean == pytest.approx(math.sinh(0.5) ** 2, abs=1e-8)
        assert mean == pytest.approx(SV_MEAN_R05, abs=1e-12)

    def test_squeezed_parity(self):
        assert np.abs(squeezed_vacuum_fock(0.6, 40)[1::2]).max() < 1e-12

    def test_squeezed_amplitudes_and_sign(self):
        r = 0.5
        amps = squeezed_vacuum_fock(r, 40)
        for m in range(10):
            expected = (-math.tanh(r)) ** m * math.sqrt(math.factorial(2 * m)) / (2**m * math.factorial(m))
            assert amps[2 * m].real == pytest.approx(expected / math.sqrt(math.cosh(r)), abs=1e-13)
        assert amps[4].real == pytest.approx(SV_C4_R05, rel=1e-12)
        assert amps[2].real < 0

    def test_squeezed_coherent_mean(self):
        mean, _ = photon_moments(displaced_squeezed_fock(1.5, 0.4, 40))
        assert mean == pytest.approx(1.5**2 + math.sinh(0.4) ** 2, abs=1e-10)

    def test_negative_r(self):
        with pytest.raises(DomainError):
            squeezed_vacuum_fock(-0.1, 10)


class TestTruncation:
    def test_vacuum(self):
        assert truncation_error(coherent_fock(0, 40)) == 0.0
        assert truncation_error(vacuum_pair()) == 0.0

    def test_coherent_two(self):
        assert truncation_error(coherent_fock(2.0, 40)) < 1e-12

    def test_coherent_six_flagged(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            err = truncation_error(coherent_fock(6.0, 40))
        assert err > TRUNCATION_GATE

    def test_escalation(self):
        assert adequate_n_max(CoherentSqueezedVacuum(2.0, 0.5)) == 40
        n = adequate_n_max(CoherentSqueezedVacuum(2.0, 1.0))
        assert n > 40
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            assert truncation_error(input_state(CoherentSqueezedVacuum(2.0, 1.0), n)) < TRUNCATION_GATE

    def test_escalation_limit(self):
        with pytest.raises(DomainError):
            adequate_n_max(Coherent(20.0), limit=60)


class TestMZI:
    def test_vacuum_stays_vacuum(self):
        out = mzi_output_state(vacuum_pair(), 0.8)
        assert abs(out.amplitudes[0, 0]) == pytest.approx(1.0)
        assert observable_stats(out, Observable.N_D) == pytest.approx((0.0, 0.0), abs=1e-15)

    def test_single_photon_dark_port(self):
        one = np.zeros(3)
        one[1] = 1.0
        state = TwoModeFockState.product(coherent_fock(0, 2), one)
        out = mzi_output_state(state, math.pi)
        assert abs(out.amplitudes[0, 1]) ** 2 == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("phi", [0.0, 0.7, math.pi / 2, 2.9])
    def test_port_transformation_on_coherent_inputs(self, phi):
        # Coherent inputs stay coherent: the output means follow the mode matrix.
        b0, b1 = 0.8 - 0.3j, 1.1 + 0.4j
        state = TwoModeFockState.product(coherent_fock(b0, 30), coherent_fock(b1, 30))
        n4, n5 = mzi_output_state(state, phi).mode_means()
        s, c = math.sin(phi / 2), math.cos(phi / 2)
        assert n4 == pytest.approx(abs(-s * b0 + c * b1) ** 2, abs=1e-10)
        assert n5 == pytest.approx(abs(c * b0 + s * b1) ** 2, abs=1e-10)

    @pytest.mark.parametrize("phi", [0.0, 1.0, 2.5, 4.0])
    def test_norm_and_energy(self, phi):
        state = input_state(CoherentSqueezedVacuum(1.5, 0.4, 0.3), 30)
        out = mzi_output_state(state, phi)
        assert out.norm() == pytest.approx(1.0, abs=1e-12)
        n_in = sum(state.normalized().mode_means())
        assert sum(out.mode_means()) == pytest.approx(n_in, abs=1e-10)

    def test_coherent_split(self):
        state = input_state(Coherent(2.0), 40)
        for phi in (0.3, 1.7):
            mean, _ = observable_stats(mzi_output_state(state, phi), Observable.N_4)
            assert mean == pytest.approx(math.cos(phi / 2) ** 2 * 4.0, abs=1e-10)

    def test_propagator_matches_state_stats(self):
        state = input_state(CoherentSqueezedVacuum(2.0, 0.5, 0.2), 30)
        prop = MZIPropagator(state)
        out = prop.state(1.1)
        stats = prop.stats(1.1)
        for obs in Observable:
            assert observable_stats(out, obs) == pytest.approx(stats[obs], abs=1e-11)

    def test_state_is_immutable(self):
        state = vacuum_pair()
        with pytest.raises(ValueError):
            state.amplitudes[0, 0] = 2.0


class TestObservables:
    def test_coherent_balanced(self):
        out = mzi_output_state(input_state(Coherent(2.0), 40), math.pi / 2)
        mean, var = observable_stats(out, Observable.N_D)
        assert mean == pytest.approx(0.0, abs=1e-8)
        assert var == pytest.approx(4.0, abs=1e-8)

    def test_csv_difference_variance(self):
        out = mzi_output_state(input_state(CoherentSqueezedVacuum(2.0, 0.5), 40), math.pi / 3)
        mean, var = observable_stats(out, Observable.N_D)
        ref_mean, ref_var, _ = difference_moments(2.0, 0.0, 0.5, math.pi / 3)
        assert mean == pytest.approx(ref_mean, rel=1e-6)
        assert var == pytest.approx(ref_var, rel=1e-6)

    def test_theta_profile(self):
        # Var(N_d) = A + B (1 - cos 2 theta) at fixed phi.
        phi, a, r = 1.1, 2.0, 0.5
        thetas = np.linspace(0, math.pi, 7)
        var = np.array(
            [MZIPropagator(input_state(CoherentSqueezedVacuum(a, r, t), 40)).stats(phi)[Observable.N_D][1] for t in thetas]
        )
        A = var[0]
        B = (var[3] - A) / 2.0  # theta = pi/2
        np.testing.assert_allclose(var, A + B * (1 - np.cos(2 * thetas)), rtol=1e-6)
        assert B == pytest.approx(math.sin(phi) ** 2 * a**2 * math.sinh(2 * r), rel=1e-6)

    def test_oracle_rejects_uncorrected_variance_forms(self):
        # At theta = 0, phi = pi/2 the difference variance is sinh^2 r + |a|^2 e^{-2r};
        # with e^{-r} instead it would be visibly larger.
        a, r = 2.0, 0.5
        prop = MZIPropagator(input_state(CoherentSqueezedVacuum(a, r), 40))
        var_d = prop.stats(math.pi / 2)[Observable.N_D][1]
        assert var_d == pytest.approx(math.sinh(r) ** 2 + a**2 * math.exp(-2 * r), rel=1e-9)
        assert abs(var_d - (math.sinh(r) ** 2 + a**2 * math.exp(-r))) > 0.5
        # Coherent single detector: variance is cos^2(phi/2)|a|^2, not cos^2(phi)|a|^2.
        phi = 1.0
        var_4 = MZIPropagator(input_state(Coherent(a), 40)).stats(phi)[Observable.N_4][1]
        assert var_4 == pytest.approx(math.cos(phi / 2) ** 2 * a**2, rel=1e-9)
        assert abs(var_4 - math.cos(phi) ** 2 * a**2) > 1.0

    def test_moment_checks_rejects_dual(self):
        with pytest.raises(DomainError):
            moment_checks(DualSqueezedCoherent(1.0, 0.5), [1.0])

    def test_moment_checks(self):
        checks = moment_checks(CoherentSqueezedVacuum(1.0, 0.3, math.pi / 4), [0.5, 1.5, 2.5])
        assert len(checks) == 6
        assert max(max(c.mean_error, c.variance_error) for c in checks) < 1e-9


class TestNumericSensitivity:
    def test_coherent_difference(self):
        rep = numeric_sensitivity(Coherent(2.0), math.pi / 2, DIFF)
        assert rep.numeric_sensitivity == pytest.approx(0.5, rel=5e-3)
        assert rep.relative_error < 1e-8
        assert not rep.gated

    def test_coherent_single_dark_fringe(self):
        rep = numeric_sensitivity(Coherent(2.0), math.pi, SINGLE)
        assert rep.numeric_sensitivity == pytest.approx(0.5, rel=5e-3)
        assert rep.phi_evaluated < math.pi

    def test_csv_single_optimum(self):
        phi, _ = csv_optimal_phase(2.0, 0.5)
        rep = numeric_sensitivity(CoherentSqueezedVacuum(2.0, 0.5), phi, SINGLE)
        assert rep.numeric_sensitivity == pytest.approx(csv_single_detector_optimum(2.0, 0.5), rel=0.01)

    def test_csv_difference_closed_form(self):
        rep = numeric_sensitivity(CoherentSqueezedVacuum(2.0, 0.5), math.pi / 2, DIFF)
        assert rep.relative_error < 0.01

    def test_zero_slope_raises(self):
        with pytest.raises(SingularPhaseError):
            numeric_sensitivity(CoherentSqueezedVacuum(2.0, 0.5), math.pi, DIFF)

    def test_dual_state_has_no_closed_form(self):
        rep = numeric_sensitivity(DualSqueezedCoherent(1.0, 0.3), 1.0, DIFF, n_max=30)
        assert rep.closed_form_value is None and rep.relative_error is None
        assert rep.numeric_sensitivity > 0

    def test_gating_reported(self):
        rep = numeric_sensitivity(Coherent(2.0), math.pi / 2, DIFF, n_max=15)
        assert rep.gated and rep.truncation_tail > TRUNCATION_GATE

    def test_report_serialises(self):
        rep = numeric_sensitivity(Coherent(1.0), 1.0, SINGLE)
        data = json.loads(json.dumps(rep.as_dict()))
        assert data["dphi_step"] == 1e-4 and data["n_max"] == 40
