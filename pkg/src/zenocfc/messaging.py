"""Bit- and image-level protocol: error and violation formulas, choice of
photons per bit, and Monte Carlo transmission of bitmap messages."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _rng, backend
from .detection import ClickProbabilities, NoiseParams, TrialRng, click_probabilities
from .protocol import ProtocolSpec


@dataclass(frozen=True)
class EncodingConfig:
    photons_per_bit: int
    num_beamsplitters: int

    def __post_init__(self):
        if self.photons_per_bit < 1:
            raise ValueError(f"photons_per_bit must be >= 1, got {self.photons_per_bit}")
        if self.num_beamsplitters < 2:
            raise ValueError(f"num_beamsplitters must be >= 2, got {self.num_beamsplitters}")


@dataclass(frozen=True, eq=False)
class BitmapMessage:
    """Row-major binary image; white pixels are logic 1, black are logic 0."""

    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"dimensions must be >= 1, got {self.width}x{self.height}")
        bits = np.asarray(self.bits, dtype=np.uint8).reshape(-1).copy()
        if bits.size != self.width * self.height:
            raise ValueError(f"expected {self.width * self.height} bits, got {bits.size}")
        if np.any(bits > 1):
            raise ValueError("bits must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __eq__(self, other):
        if not isinstance(other, BitmapMessage):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and bool(
            np.array_equal(self.bits, other.bits)
        )

    @property
    def size(self) -> int:
        return self.bits.size

    @property
    def num_white(self) -> int:
        return int(self.bits.sum())

    def complement(self) -> "BitmapMessage":
        return BitmapMessage(self.width, self.height, 1 - self.bits)

    def rows(self) -> np.ndarray:
        return self.bits.reshape(self.height, self.width)


@dataclass(frozen=True, eq=False)
class TransmissionReport:
    fidelity: float
    avg_bit_error: float
    violation_prob_bit0: float
    violation_prob_total: float
    sent: np.ndarray
    received: np.ndarray

    @property
    def mismatches(self) -> int:
        return int(np.count_nonzero(self.sent != self.received))


def avg_bit_error(m: int, p1_err: float, p0_err: float, exact: bool = True) -> float:
    """Average error over equiprobable bits with ``m`` photons per bit.

    ``p1_err`` is the per-photon probability of *no* D_A click for logic 1;
    ``p0_err`` the per-photon click probability for logic 0.  The
    approximate form replaces ``1 - (1 - p0_err)**m`` by ``m * p0_err``.
    """
    if m < 1:
        raise ValueError(f"M must be >= 1, got {m}")
    miss1 = p1_err**m
    if exact:
        # -expm1(m log1p(-p)) keeps precision for tiny p0_err
        false0 = -np.expm1(m * np.log1p(-p0_err)) if p0_err < 1.0 else 1.0
    else:
        false0 = m * p0_err
    return 0.5 * (miss1 + float(false0))


def avg_bit_error_curve(m_values, p1_err: float, p0_err: float, exact: bool = True) -> np.ndarray:
    m = np.asarray(m_values, dtype=np.float64)
    miss1 = np.power(p1_err, m)
    if exact:
        false0 = -np.expm1(m * np.log1p(-p0_err)) if p0_err < 1.0 else np.ones_like(m)
    else:
        false0 = m * p0_err
    return 0.5 * (miss1 + false0)


def violation_probability(m: int, p0_err: float, eta: float) -> float:
    if not (0.0 < eta <= 1.0):
        raise ValueError(f"detector efficiency must be in (0, 1], got {eta}")
    if m < 1:
        raise ValueError(f"M must be >= 1, got {m}")
    return m * p0_err / (2.0 * eta)


def calibrate_p0_error(violation: float, m: int, eta: float) -> float:
    """Per-photon logic-0 error that yields ``violation`` at ``m`` photons."""
    if not (0.0 < eta <= 1.0):
        raise ValueError(f"detector efficiency must be in (0, 1], got {eta}")
    return violation * 2.0 * eta / m


def optimal_m(p1_err: float, p0_err: float, m_max: int) -> tuple[int, float]:
    """Photons per bit minimising the exact average error on 1..m_max.

    Ties go to the smaller M, which carries less violation.
    """
    if m_max < 1:
        raise ValueError(f"m_max must be >= 1, got {m_max}")
    m = np.arange(1, m_max + 1)
    err = avg_bit_error_curve(m, p1_err, p0_err, exact=True)
    i = int(np.argmin(err))  # first occurrence
    return int(m[i]), float(err[i])


def image_fidelity(sent: BitmapMessage, received: BitmapMessage) -> float:
    if (sent.width, sent.height) != (received.width, received.height):
        raise ValueError(
            f"dimension mismatch: {sent.width}x{sent.height} vs {received.width}x{received.height}"
        )
    agree = np.count_nonzero(sent.bits == received.bits)
    return agree / sent.size


def bit1_violation_bound(m: int, p_violation_bit1: float) -> float:
    """Chance that at least one of ``m`` photons backscatters for a logic 1."""
    return float(-np.expm1(m * np.log1p(-p_violation_bit1))) if p_violation_bit1 < 1.0 else 1.0


def expected_fidelity(msg: BitmapMessage, m: int, probs: ClickProbabilities) -> float:
    n1 = msg.num_white
    n0 = msg.size - n1
    miss1 = (1.0 - probs.p_click_bit1) ** m
    false0 = 1.0 - (1.0 - probs.p_click_bit0) ** m
    return 1.0 - (n1 * miss1 + n0 * false0) / msg.size


def transmit_message(
    msg: BitmapMessage,
    cfg: EncodingConfig,
    noise: NoiseParams,
    rng: TrialRng,
    probs: ClickProbabilities | None = None,
) -> TransmissionReport:
    """Send every pixel as ``cfg.photons_per_bit`` photons and decode.

    Bit i draws photon counters ``i*M .. i*M + M - 1`` from ``rng``, so the
    result does not depend on how the bits are batched.
    """
    if probs is None:
        probs = click_probabilities(ProtocolSpec(cfg.num_beamsplitters, 0), noise)
    m = cfg.photons_per_bit
    sent = msg.bits
    t = sent.size
    p = np.where(sent == 1, probs.p_click_bit1, probs.p_click_bit0)
    keys = np.full(t, rng.key, dtype=np.uint64)
    offsets = np.arange(t, dtype=np.uint64) * np.uint64(m)
    received = backend.any_click(keys, offsets, m, p)

    mismatches = int(np.count_nonzero(sent != received))
    fidelity = 1.0 - mismatches / t
    wrong0 = int(np.count_nonzero((sent == 0) & (received == 1)))
    v0 = wrong0 / t
    v1 = msg.num_white / t * bit1_violation_bound(m, probs.p_violation_bit1)
    return TransmissionReport(
        fidelity=fidelity,
        avg_bit_error=mismatches / t,
        violation_prob_bit0=v0,
        violation_prob_total=v0 + v1,
        sent=sent.copy(),
        received=received,
    )


def received_message(msg: BitmapMessage, report: TransmissionReport) -> BitmapMessage:
    return BitmapMessage(msg.width, msg.height, report.received)


def random_message(width: int, height: int, white_fraction: float, seed: int) -> BitmapMessage:
    """Seeded test image with the given expected share of white pixels."""
    u = _rng.uniforms(_rng.stream_key(seed, 0), 0, width * height)
    return BitmapMessage(width, height, (u < white_fraction).astype(np.uint8))
