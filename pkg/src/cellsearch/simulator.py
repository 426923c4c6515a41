"""Frequency-domain Monte Carlo source for synchronization windows.

Windows are synthesized directly at the DFT output: the PSS-bearing
symbol carries the channel frequency response of a fresh fading
realization, shifted by the integer frequency offset and rotated by the
timing-error phase ramp (generated through the equivalent-CIR path, so
the ramp convention matches the detector's basis design exactly); every
other symbol holds data-like i.i.d. Gaussian bins.  No time-domain OFDM
front end is involved.

SNR is defined on the PSS bins: average per-bin signal power (one, for
the expectation-normalized channel) over the noise power sigma_w^2.
Data symbols get per-bin power 1 + sigma_w^2, the power of a loaded
symbol, so position detection cannot cheat on raw symbol energy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import (DFT_SIZE, SAMPLE_RATE, PulseShape, TapProfile,
                      builtin_profile, cir_length, fourier_matrix,
                      realize_channel, shift_to_equivalent)
from .detector import DEFAULT_IFO_SET, MAX_ABS_IFO, Hypothesis
from .zc import PSS_HALF, SCH_BINS, SCH_HALF, ZC_ROOTS, generate_pss


def _default_profile() -> TapProfile:
    return builtin_profile("etu")


@dataclass(frozen=True)
class SimScenario:
    """One operating point of the simulator.

    ``q``, ``root`` and ``nu`` may each be None, meaning they are drawn
    fresh per trial (position uniform in [1, n_q], root uniform over the
    three sequences, IFO uniform over the standard search set); error
    rates over randomized truth are what the sweep harness reports.
    ``seed`` is the master seed from which per-trial generators derive.
    """

    snr_db: float
    theta: int = 40
    theta_max: int = 40
    nu: int | None = 0
    root: int | None = 25
    q: int | None = None
    n_q: int = 60
    profile: TapProfile = field(default_factory=_default_profile)
    pulse: PulseShape = field(default_factory=PulseShape)
    sample_rate: float = SAMPLE_RATE
    dft_size: int = DFT_SIZE
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.theta <= self.theta_max:
            raise ValueError(f"theta must be in [0, {self.theta_max}], got {self.theta}")
        if self.nu is not None and abs(self.nu) > MAX_ABS_IFO:
            raise ValueError(f"|nu| must be <= {MAX_ABS_IFO}, got {self.nu}")
        if self.root is not None and self.root not in ZC_ROOTS:
            raise ValueError(f"root must be one of {ZC_ROOTS}, got {self.root!r}")
        if self.n_q < 1:
            raise ValueError(f"n_q must be >= 1, got {self.n_q}")
        if self.q is not None and not 1 <= self.q <= self.n_q:
            raise ValueError(f"q must be in [1, {self.n_q}], got {self.q}")
        if not (np.isfinite(self.snr_db) or self.snr_db == np.inf):
            raise ValueError(f"snr_db must be finite or +inf, got {self.snr_db}")

    def metadata(self) -> dict:
        """Scenario parameters for sweep/window sidecar records."""
        rand = lambda v: "random" if v is None else v
        return {
            "snr_db": self.snr_db, "theta": self.theta, "theta_max": self.theta_max,
            "nu": rand(self.nu), "root": rand(self.root), "q": rand(self.q),
            "n_q": self.n_q, "profile": self.profile.name,
            "sample_rate": self.sample_rate, "dft_size": self.dft_size,
            "seed": self.seed,
            "snr_definition": "mean PSS-bin signal power over noise power",
            "data_symbol_power": "1 + sigma_w^2 per bin",
        }


def apply_snr(signal_power: float, snr_db: float) -> float:
    """Noise variance that puts ``signal_power`` at ``snr_db`` decibels."""
    if signal_power <= 0.0:
        raise ValueError("signal_power must be positive")
    return signal_power / 10.0 ** (snr_db / 10.0)


def simulate_window(scenario: SimScenario, rng: np.random.Generator):
    """Draw one synchronization window.

    Returns ``(window, truth, h)``: the (n_q, 73) observation stack, the
    ground-truth hypothesis for scoring, and the CIR realization behind
    the PSS symbol.  Draw order (position, root, IFO, channel, noise) is
    fixed so a seeded generator reproduces the window bit for bit.
    """
    q = scenario.q if scenario.q is not None else int(rng.integers(1, scenario.n_q + 1))
    root = (scenario.root if scenario.root is not None
            else ZC_ROOTS[int(rng.integers(0, len(ZC_ROOTS)))])
    nu = (scenario.nu if scenario.nu is not None
          else int(DEFAULT_IFO_SET[int(rng.integers(0, len(DEFAULT_IFO_SET)))]))
    h = realize_channel(scenario.profile, scenario.pulse, scenario.sample_rate, rng)
    h_eq = shift_to_equivalent(h, scenario.theta, scenario.theta_max)
    fmat = fourier_matrix(h_eq.shape[0], scenario.dft_size)
    h_freq = fmat @ h_eq

    sigma_w2 = apply_snr(1.0, scenario.snr_db)
    sigma_k2 = 1.0 + sigma_w2

    raw = rng.standard_normal((scenario.n_q, SCH_BINS, 2))
    base = (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0)
    window = base * np.sqrt(sigma_k2)

    signal = np.zeros(SCH_BINS, dtype=complex)
    offset = nu + SCH_HALF - PSS_HALF
    signal[offset:offset + 2 * PSS_HALF + 1] = h_freq * generate_pss(root).samples
    window[q - 1] = signal + base[q - 1] * np.sqrt(sigma_w2)

    truth = Hypothesis(q=q, root=root, nu=nu)
    return window, truth, h


def cir_order(scenario: SimScenario) -> int:
    """CIR length L implied by the scenario's profile and pulse."""
    return cir_length(scenario.profile, scenario.pulse, scenario.sample_rate)
