import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from zenocfc.detection import ClickProbabilities, NoiseParams, TrialRng
from zenocfc.messaging import (
    BitmapMessage,
    EncodingConfig,
    avg_bit_error,
    avg_bit_error_curve,
    bit1_violation_bound,
    calibrate_p0_error,
    expected_fidelity,
    image_fidelity,
    optimal_m,
    random_message,
    transmit_message,
    violation_probability,
)


def eq3_fidelity(a, b):
    """Image fidelity written term by term."""
    t = len(a)
    return sum(Fraction(1 + (-1) ** (int(x) + int(y)), 2 * t) for x, y in zip(a, b))


def brute_force_optimum(p1, p0, m_max):
    best_m, best = None, math.inf
    for m in range(1, m_max + 1):
        e = 0.5 * (p1**m + 1 - (1 - p0) ** m)
        if e < best - 1e-18:
            best_m, best = m, e
    return best_m, best


class TestAverageError:
    def test_single_photon(self):
        assert avg_bit_error(1, 0.3, 0.0) == pytest.approx(0.15, abs=1e-16)
        assert avg_bit_error(1, 0.3, 0.0, exact=False) == pytest.approx(0.15, abs=1e-16)

    def test_exact_arithmetic(self):
        expected = float(Fraction(1, 2) * Fraction(3, 4) ** 4)
        assert expected == 0.158203125
        assert avg_bit_error(4, 0.75, 0.0) == pytest.approx(expected, abs=1e-16)

    def test_approximation_gap(self):
        gap = abs(avg_bit_error(10, 0.5, 0.001, exact=False) - avg_bit_error(10, 0.5, 0.001))
        assert gap <= (10 * 0.001) ** 2 / 2

    @pytest.mark.parametrize(
        "m, p0",
        [(m, p0) for m in (1, 2, 5, 10, 50, 100, 320, 1000) for p0 in (1e-6, 1e-5, 1e-4, 1e-3, 5e-3) if m * p0 <= 0.5],
    )
    def test_approximation_bound_grid(self, m, p0):
        gap = abs(avg_bit_error(m, 0.9, p0, exact=False) - avg_bit_error(m, 0.9, p0))
        assert gap <= (m * p0) ** 2 / 2

    def test_curve_matches_scalar(self):
        ms = np.arange(1, 200)
        curve = avg_bit_error_curve(ms, 0.98, 2e-4)
        assert np.allclose(curve, [avg_bit_error(int(m), 0.98, 2e-4) for m in ms], rtol=1e-14, atol=0)


class TestViolation:
    def test_zero(self):
        assert violation_probability(500, 0.0, 0.3) == 0.0

    def test_substitution(self):
        assert violation_probability(10, 0.01, 1.0) == pytest.approx(0.05, abs=1e-16)

    def test_eta_zero(self):
        with pytest.raises(ValueError):
            violation_probability(10, 0.01, 0.0)

    def test_calibration_roundtrip(self):
        p0 = calibrate_p0_error(0.024, 320, 0.9)
        assert p0 == pytest.approx(1.35e-4, rel=1e-12)
        assert violation_probability(320, p0, 0.9) == pytest.approx(0.024, rel=1e-12)

    @given(st.integers(1, 10_000), st.floats(1e-6, 0.1), st.floats(0.05, 1.0))
    def test_monotonic(self, m, p0, eta):
        v = violation_probability(m, p0, eta)
        assert violation_probability(m + 1, p0, eta) > v
        assert violation_probability(m, p0 * 1.01, eta) > v
        if eta < 0.99:
            assert violation_probability(m, p0, eta * 1.01) < v


class TestOptimalM:
    def test_no_bit0_errors(self):
        assert optimal_m(0.9, 0.0, 250)[0] == 250

    def test_no_bit1_errors(self):
        assert optimal_m(0.0, 1e-3, 250)[0] == 1

    def test_brute_force(self):
        p1, p0 = 0.9821888, 4.2e-5
        m, err = optimal_m(p1, p0, 1000)
        bm, berr = brute_force_optimum(p1, p0, 1000)
        assert m == bm
        assert err == pytest.approx(berr, rel=1e-12)

    def test_ties_toward_small_m(self):
        assert optimal_m(0.0, 0.0, 50) == (1, 0.0)

    def test_unimodal_calibrated(self):
        err = avg_bit_error_curve(np.arange(1, 1001), 1 - 0.0178110327, 1.35e-4)
        signs = np.sign(np.diff(err))
        changes = np.count_nonzero(np.diff(signs[signs != 0]))
        assert changes == 1 and signs[0] < 0 and signs[-1] > 0


def msg_from(bits, width=None):
    bits = np.asarray(bits, dtype=np.uint8)
    width = width or bits.size
    return BitmapMessage(width, bits.size // width, bits)


class TestFidelity:
    def test_identical(self):
        a = random_message(8, 8, 0.3, 1)
        assert image_fidelity(a, a) == 1.0

    def test_complement(self):
        a = random_message(8, 8, 0.3, 1)
        assert image_fidelity(a, a.complement()) == 0.0

    def test_one_mismatch(self):
        assert image_fidelity(msg_from([1, 0, 1, 1]), msg_from([1, 0, 0, 1])) == 0.75

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            image_fidelity(msg_from([1, 0, 1, 1], 2), msg_from([1, 0, 1, 1], 4))

    @settings(max_examples=100)
    @given(st.integers(1, 200).flatmap(lambda n: st.tuples(arrays(np.uint8, n, elements=st.integers(0, 1)),
                                                           arrays(np.uint8, n, elements=st.integers(0, 1)))))
    def test_eq3_and_bilinearity(self, pair):
        a, b = msg_from(pair[0]), msg_from(pair[1])
        assert image_fidelity(a, b) == pytest.approx(float(eq3_fidelity(a.bits, b.bits)), abs=1e-15)
        assert eq3_fidelity(a.bits, b.bits) + eq3_fidelity(a.bits, b.complement().bits) == 1


class TestBitmap:
    def test_size_check(self):
        with pytest.raises(ValueError):
            BitmapMessage(3, 2, [0, 1, 0])

    def test_non_binary(self):
        with pytest.raises(ValueError):
            BitmapMessage(2, 1, [0, 2])

    def test_random_message_ratio(self):
        m = random_message(32, 32, 0.2, 9)
        assert 0.15 < m.num_white / m.size < 0.25

    def test_encoding_config(self):
        with pytest.raises(ValueError):
            EncodingConfig(0, 6)
        with pytest.raises(ValueError):
            EncodingConfig(10, 1)


def cp(p1, p0, v1=0.0):
    return ClickProbabilities(p1, p0, p0, v1)


class TestTransmit:
    def test_noiseless_large_m(self):
        msg = random_message(16, 16, 0.5, 3)
        noise = NoiseParams.ideal()
        report = transmit_message(msg, EncodingConfig(60, 6), noise, TrialRng(1))
        assert report.fidelity == 1.0
        assert report.violation_prob_bit0 == 0.0
        assert report.violation_prob_total == 0.0

    def test_all_black_no_leak(self):
        msg = BitmapMessage(10, 10, np.zeros(100))
        report = transmit_message(msg, EncodingConfig(500, 6), NoiseParams(), TrialRng(4), probs=cp(0.02, 0.0, 1e-3))
        assert report.fidelity == 1.0 and report.violation_prob_bit0 == 0.0
        assert report.violation_prob_total == 0.0

    def test_report_identity(self):
        msg = random_message(20, 10, 0.4, 5)
        report = transmit_message(msg, EncodingConfig(30, 6), NoiseParams(), TrialRng(8), probs=cp(0.02, 0.003))
        t = msg.size
        assert Fraction(t - report.mismatches, t) + Fraction(report.mismatches, t) == 1
        assert report.fidelity == pytest.approx((t - report.mismatches) / t, abs=0)
        assert report.fidelity == pytest.approx(float(eq3_fidelity(report.sent, report.received)), abs=1e-15)
        wrong0 = np.count_nonzero((report.sent == 0) & (report.received == 1))
        assert report.violation_prob_bit0 == wrong0 / t

    def test_bit_order_independent_of_batching(self):
        # bit i of a message uses counters i*M..i*M+M-1 on the message stream
        msg = random_message(12, 1, 0.5, 2)
        rng = TrialRng(77, 3)
        report = transmit_message(msg, EncodingConfig(15, 6), NoiseParams(), rng, probs=cp(0.1, 0.05))
        for i, bit in enumerate(msg.bits):
            u = rng.uniforms(15, start=i * 15)
            p = 0.1 if bit else 0.05
            assert report.received[i] == int((u < p).any())

    def test_total_violation_adds_bit1_bound(self):
        msg = random_message(16, 16, 0.3, 6)
        report = transmit_message(msg, EncodingConfig(320, 6), NoiseParams(), TrialRng(9), probs=cp(0.0178, 1.35e-4, 1e-4))
        extra = msg.num_white / msg.size * bit1_violation_bound(320, 1e-4)
        assert report.violation_prob_total == pytest.approx(report.violation_prob_bit0 + extra, abs=1e-15)

    def test_monte_carlo_converges(self):
        msg = random_message(32, 32, 0.5, 12)
        probs = cp(0.0178, 1.35e-4)
        fids = np.array(
            [transmit_message(msg, EncodingConfig(100, 6), NoiseParams(), TrialRng(31, r), probs=probs).fidelity
             for r in range(200)]
        )
        expected = expected_fidelity(msg, 100, probs)
        assert abs(fids.mean() - expected) <= 5 * fids.std(ddof=1) / math.sqrt(len(fids))
