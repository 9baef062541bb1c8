"""Detection statistics: heralding loss, detector efficiency, dark counts,
and seeded Monte Carlo of M-photon bit transmissions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _rng, backend
from .protocol import ProtocolSpec, run_photon


def _check_prob(name, value):
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class NoiseParams:
    """Channel and detector imperfections.

    Defaults are the device figures: ~3 % heralding efficiency, ~90 %
    detector efficiency, 99.94 % interferometric visibility and at most 1 %
    swap backscatter.  ``dark_prob`` is per coincidence window and is not a
    measured figure.  ``bit0_click_prob``, when set, replaces the
    visibility model for the logic-0 per-photon click probability (use it to
    pin a measured or calibrated P0,err).
    """

    heralding_efficiency: float = 0.03
    detector_efficiency: float = 0.90
    dark_prob: float = 1e-6
    coincidence_window_ns: float = 2.5
    visibility: float = 0.9994
    swap_backscatter: float = 0.01
    bit0_click_prob: float | None = None

    def __post_init__(self):
        _check_prob("heralding_efficiency", self.heralding_efficiency)
        _check_prob("detector_efficiency", self.detector_efficiency)
        _check_prob("dark_prob", self.dark_prob)
        _check_prob("visibility", self.visibility)
        _check_prob("swap_backscatter", self.swap_backscatter)
        if self.bit0_click_prob is not None:
            _check_prob("bit0_click_prob", self.bit0_click_prob)
        if not self.coincidence_window_ns > 0:
            raise ValueError("coincidence_window_ns must be positive")

    @classmethod
    def ideal(cls) -> "NoiseParams":
        return cls(1.0, 1.0, 0.0, 2.5, 1.0, 0.0)


@dataclass(frozen=True)
class ClickProbabilities:
    """Per-heralded-photon probabilities that D_A fires, and leakage.

    ``p_violation_*`` count physical leakage only; ``p_violation_bit0_eq2``
    is the logic-0 click probability divided by detector efficiency, which
    also counts dark clicks.
    """

    p_click_bit1: float
    p_click_bit0: float
    p_violation_bit0: float
    p_violation_bit1: float
    p_violation_bit0_eq2: float = 0.0

    def click(self, bit: int) -> float:
        return self.p_click_bit1 if bit else self.p_click_bit0


def _with_darks(p: float, d: float) -> float:
    # 1 - (1-p)(1-d), arranged so p=0 returns d exactly
    return p + d - p * d


def click_probabilities(spec: ProtocolSpec, noise: NoiseParams) -> ClickProbabilities:
    """Click statistics for both bit values of ``spec.num_beamsplitters``.

    Visibility and backscatter come from ``noise``; ``spec.bob_bit`` is
    ignored.
    """
    h = noise.heralding_efficiency
    eta = noise.detector_efficiency
    d = noise.dark_prob
    base = ProtocolSpec(
        spec.num_beamsplitters,
        1,
        visibility=noise.visibility,
        swap_backscatter=noise.swap_backscatter,
        visibility_model=spec.visibility_model,
        noise_seed=spec.noise_seed,
    )
    out1 = run_photon(base)
    p_click1 = _with_darks(h * eta * out1.p_alice, d)
    viol1 = h * out1.p_violation_amp

    if noise.bit0_click_prob is None:
        if noise.visibility == 1.0:
            # perfect destructive interference at D_A; propagation leaves ~1e-33 round-off
            leak0 = 0.0
        else:
            leak0 = run_photon(base.with_bit(0)).p_alice
        p_click0 = _with_darks(h * eta * leak0, d)
        viol0 = h * leak0
    else:
        p_click0 = noise.bit0_click_prob
        # measured clicks include darks; strip them before undoing eta
        real = max(0.0, (p_click0 - d) / (1.0 - d)) if d < 1.0 else 0.0
        viol0 = min(1.0, real / eta) if eta > 0 else 0.0
    eq2 = min(1.0, p_click0 / eta) if eta > 0 else 0.0
    return ClickProbabilities(p_click1, p_click0, viol0, viol1, eq2)


@dataclass(frozen=True)
class TrialRng:
    """Counter-based random stream; equal (seed, stream_id) give equal draws."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < 1 << 64) or not (0 <= self.stream_id < 1 << 64):
            raise ValueError("seed and stream_id must be unsigned 64-bit integers")

    @property
    def key(self) -> int:
        return _rng.stream_key(self.seed, self.stream_id)

    def uniforms(self, count: int, start: int = 0) -> np.ndarray:
        return _rng.uniforms(self.key, start, count)

    def child(self, index: int) -> "TrialRng":
        """Independent generator for sub-experiment ``index``."""
        return TrialRng(_rng.derive_seed(self.seed, self.stream_id), index)


def sample_bit_transmission(bit: int, m: int, probs: ClickProbabilities, rng: TrialRng) -> int:
    """Send ``m`` photons; Alice records 1 iff at least one D_A click."""
    if m < 1:
        raise ValueError(f"M must be >= 1, got {m}")
    p = probs.click(bit)
    keys = np.array([rng.key], dtype=np.uint64)
    return int(backend.any_click(keys, np.zeros(1, dtype=np.uint64), m, np.array([p]))[0])


def sample_trials(p: float, m: int, trials: int, seed: int) -> np.ndarray:
    """Recorded bits for ``trials`` independent M-photon transmissions.

    Trial t uses ``TrialRng(seed, t)``, so row t equals
    ``sample_bit_transmission(..., TrialRng(seed, t))``.
    """
    if m < 1:
        raise ValueError(f"M must be >= 1, got {m}")
    keys = _rng.stream_keys(seed, np.arange(trials, dtype=np.uint64))
    return backend.any_click(keys, np.zeros(trials, dtype=np.uint64), m, np.full(trials, p))
