"""Tests for the no-signaling verifier and the channel-information estimator."""

import math

import numpy as np
import pytest

from qtelegraph.device import (
    DeviceConfig,
    coherent_distribution,
    eraser_conditionals,
    incoherent_distribution,
    pipe_amplitude,
)
from qtelegraph.nosignal import (
    NoSignalReport,
    channel_mutual_information,
    eraser_decomposition_check,
    jensen_shannon_bits,
    mixture_residual,
    plugin_mutual_information,
    reduced_screen_by_measurement_mixture,
    reduced_screen_by_partial_trace,
    total_variation,
    verify_no_signaling,
)
from qtelegraph.protocol import Detector, ModelMode, TransmissionPlan, screen_marginal
from qtelegraph.quantum import trace_distance
from qtelegraph.rng import stream

from test_protocol import PINNED_M_STAR

ENVELOPE_COMPLETE = DeviceConfig(x_max=8.0, bins=256)


class TestDistanceHelpers:
    def test_total_variation_bounds(self):
        assert total_variation(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 1.0
        assert total_variation(np.array([0.5, 0.5]), np.array([0.5, 0.5])) == 0.0

    def test_jensen_shannon_of_identical_is_exact_zero(self):
        p = incoherent_distribution(DeviceConfig()).probabilities
        assert jensen_shannon_bits(p, p) == 0.0

    def test_jensen_shannon_of_disjoint_is_one_bit(self):
        assert jensen_shannon_bits(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(
            1.0, abs=1e-12
        )


class TestVerifyNoSignaling:
    def test_unitary_mode_passes_with_margin(self):
        report = verify_no_signaling(DeviceConfig(), ModelMode.UNITARY_QM)
        assert report.tv_distance < 1e-12
        assert report.trace_distance_reduced < 1e-12
        assert report.mutual_information_bits < 1e-12
        assert report.verdict == "pass"

    def test_naive_collapse_fails_loudly(self):
        report = verify_no_signaling(DeviceConfig(), ModelMode.NAIVE_COLLAPSE)
        assert report.tv_distance > 0.3
        assert report.trace_distance_reduced > 0.3
        assert report.mutual_information_bits > 0.01
        assert report.verdict == "fail"

    def test_vacuous_tolerance_passes_every_mode(self):
        for mode in ModelMode:
            report = verify_no_signaling(DeviceConfig(), mode, distance_tolerance=1.0)
            assert report.verdict == "pass"

    def test_invalid_tolerance_rejected(self):
        with pytest.raises(ValueError, match="tolerance"):
            verify_no_signaling(DeviceConfig(), ModelMode.UNITARY_QM, distance_tolerance=0.0)

    def test_report_serialization_round_trip(self):
        report = verify_no_signaling(DeviceConfig(), ModelMode.UNITARY_QM)
        text = report.to_text()
        assert "verdict: pass" in text
        assert "tv_distance" in text
        assert report.to_dict()["mode"] == "UnitaryQM"

    def test_report_verdict_consistency_enforced(self):
        with pytest.raises(ValueError, match="verdict"):
            NoSignalReport(
                mode=ModelMode.UNITARY_QM,
                tv_distance=0.5,
                trace_distance_reduced=0.0,
                mutual_information_bits=0.0,
                distance_tolerance=1e-10,
                mi_tolerance=0.01,
                verdict="pass",
            )


class TestReducedStateRoutes:
    def test_partial_trace_and_mixture_routes_agree(self):
        cfg = DeviceConfig()
        route_a = reduced_screen_by_partial_trace(cfg)
        route_b = reduced_screen_by_measurement_mixture(cfg)
        assert trace_distance(route_a, route_b) < 1e-12

    def test_unitary_marginals_identical_twice_over(self):
        """Bin-by-bin identity of the two detector-setting marginals (same
        computation path, 1e-15) and independently against the
        measurement-mixture route (1e-12)."""
        cfg = DeviceConfig()
        off = screen_marginal(cfg, Detector.OFF, ModelMode.UNITARY_QM).probabilities
        on = screen_marginal(cfg, Detector.ON, ModelMode.UNITARY_QM).probabilities
        assert np.abs(on - off).max() < 1e-15
        mixture_diagonal = reduced_screen_by_measurement_mixture(cfg).diagonal_probabilities()
        assert np.abs(off - mixture_diagonal).max() < 1e-12


class TestMixtureIdentities:
    def test_which_path_mixture_recovers_marginal(self):
        """Sum over pipe outcomes of P(pipe) * p(x | pipe) equals the
        unconditional marginal, assembled here from the amplitude formula."""
        cfg = DeviceConfig()
        xs = cfg.bin_centers()
        mixture = np.zeros(cfg.bins)
        for pipe in (1, 2):
            conditional = np.abs(np.asarray(pipe_amplitude(cfg, pipe, xs))) ** 2
            mixture += 0.5 * conditional / conditional.sum()
        p_i = incoherent_distribution(cfg).probabilities
        assert np.abs(mixture - p_i).max() < 1e-12

    def test_eraser_mixture_recovers_marginal_at_defaults(self):
        # Born-weighted (not unweighted) average: exact at every config.
        cfg = DeviceConfig()
        conditionals = eraser_conditionals(cfg)
        mixture = (
            conditionals.prob_plus * conditionals.p_plus.probabilities
            + conditionals.prob_minus * conditionals.p_minus.probabilities
        )
        p_i = incoherent_distribution(cfg).probabilities
        assert np.abs(mixture - p_i).max() < 1e-12


class TestEraserDecomposition:
    def test_envelope_complete_grid_meets_contract(self):
        assert eraser_decomposition_check(ENVELOPE_COMPLETE) < 1e-12

    def test_phase_independent(self):
        cfg = DeviceConfig(x_max=8.0, relative_phase=math.pi / 2)
        assert eraser_decomposition_check(cfg) < 1e-12

    def test_default_truncation_residual_scale(self):
        # Envelope truncation at the default x_max=5 leaves a ~1e-9 residual
        # in the unweighted average; see the decisions notes.
        residual = eraser_decomposition_check(DeviceConfig())
        assert residual < 1e-8

    def test_detects_perturbation(self):
        cfg = ENVELOPE_COMPLETE
        conditionals = eraser_conditionals(cfg)
        perturbed = conditionals.p_plus.probabilities.copy()
        perturbed[10] += 1e-3
        residual = mixture_residual(
            perturbed,
            conditionals.p_minus.probabilities,
            incoherent_distribution(cfg).probabilities,
        )
        assert residual >= 5e-4


class TestPluginMutualInformation:
    def test_single_sample_is_zero(self):
        assert plugin_mutual_information([0], [1]) == 0.0

    def test_perfect_correlation_is_one_bit(self):
        bits = [0, 1, 0, 1, 1, 0]
        assert plugin_mutual_information(bits, bits) == pytest.approx(1.0, abs=1e-12)

    def test_balanced_independence_is_zero(self):
        assert plugin_mutual_information([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="length"):
            plugin_mutual_information([0, 1], [0])


class TestChannelMutualInformation:
    def test_zero_symbols_rejected(self):
        with pytest.raises(ValueError, match="symbols"):
            channel_mutual_information(
                ModelMode.UNITARY_QM, TransmissionPlan(), 0, DeviceConfig(), stream(0, "mi")
            )

    def test_single_symbol_is_exactly_zero(self):
        mi = channel_mutual_information(
            ModelMode.UNITARY_QM,
            TransmissionPlan(M=5),
            1,
            DeviceConfig(),
            stream(1, "mi"),
        )
        assert mi == 0.0

    def test_naive_collapse_carries_most_of_a_bit(self):
        # Binary channel with crossover <= 0.02 has capacity >= 0.857 bits.
        plan = TransmissionPlan(M=PINNED_M_STAR, T=1.0, N=4)
        mi = channel_mutual_information(
            ModelMode.NAIVE_COLLAPSE, plan, 10_000, DeviceConfig(), stream(2, "mi")
        )
        assert mi >= 0.85

    def test_unitary_channel_carries_nothing(self):
        plan = TransmissionPlan(M=PINNED_M_STAR, T=1.0, N=4)
        mi = channel_mutual_information(
            ModelMode.UNITARY_QM, plan, 600, DeviceConfig(), stream(3, "mi")
        )
        assert mi <= 0.05

    def test_naive_information_non_decreasing_in_m(self):
        """More pairs per symbol cannot hurt the collapse-model channel;
        checked over M in {1, 10, M*} with a 3-sigma statistical slack."""
        mis = []
        for index, m in enumerate((1, 10, PINNED_M_STAR)):
            plan = TransmissionPlan(M=m, T=1.0, N=2)
            mis.append(
                channel_mutual_information(
                    ModelMode.NAIVE_COLLAPSE, plan, 2500, DeviceConfig(), stream(4, "mi", index)
                )
            )
        slack = 0.05
        assert mis[0] <= mis[1] + slack
        assert mis[1] <= mis[2] + slack
