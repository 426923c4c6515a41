"""Multipath channel model for the synchronization subband.

A tapped-delay-line Rayleigh channel is sampled from a power-delay
profile with raised-cosine pulse shaping, yielding a sample-spaced CIR
``h`` of length L.  A residual timing error of ``theta`` samples turns
``h`` into the equivalent CIR ``h_eq = [0_theta, h, 0_(theta_max-theta)]``
whose frequency response over the 63 PSS subcarriers is ``F @ h_eq``,
where F is the 63 x L_eq Fourier block defined here.  The timing error
therefore appears as the per-bin phase ramp exp(-j 2 pi n theta / N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Mapping

import numpy as np

from .zc import PSS_HALF

#: Baseband sampling rate of the 20 MHz LTE configuration (Hz).
SAMPLE_RATE = 30.72e6

#: Receive DFT size for that configuration.
DFT_SIZE = 2048


@dataclass(frozen=True)
class PulseShape:
    """Raised-cosine shaping pulse, truncated to ``support`` sample periods."""

    rolloff: float = 0.22
    support: int = 6

    def __post_init__(self):
        if not 0.0 < self.rolloff <= 1.0:
            raise ValueError(f"rolloff must be in (0, 1], got {self.rolloff}")
        if self.support < 1:
            raise ValueError(f"support must be >= 1, got {self.support}")

    def sample(self, t):
        """Pulse value at offsets ``t`` (in sample periods); zero outside
        the truncation window |t| <= support / 2."""
        t = np.asarray(t, dtype=float)
        val = raised_cosine(t, self.rolloff)
        return np.where(np.abs(t) <= self.support / 2.0, val, 0.0)


def raised_cosine(t, rolloff: float):
    """Raised-cosine impulse sinc(t) cos(pi b t) / (1 - (2 b t)^2).

    The removable singularity at |t| = 1 / (2 b) is evaluated by its
    limit (pi / 4) sinc(1 / (2 b)).
    """
    t = np.asarray(t, dtype=float)
    den = 1.0 - (2.0 * rolloff * t) ** 2
    singular = np.abs(den) < 1e-10
    safe = np.where(singular, 1.0, den)
    out = np.sinc(t) * np.cos(np.pi * rolloff * t) / safe
    limit = np.pi / 4.0 * np.sinc(1.0 / (2.0 * rolloff))
    return np.where(singular, limit, out)


@dataclass(frozen=True)
class TapProfile:
    """Power-delay profile: tap delays in seconds and mean linear powers.

    Powers are normalized to sum to one on construction; delays must be
    non-negative and strictly increasing.
    """

    name: str
    delays_s: tuple
    powers: tuple

    def __post_init__(self):
        delays = tuple(float(d) for d in self.delays_s)
        powers = tuple(float(p) for p in self.powers)
        if not delays:
            raise ValueError("tap profile must contain at least one tap")
        if len(delays) != len(powers):
            raise ValueError("delays and powers must have the same length")
        if delays[0] < 0.0 or any(b <= a for a, b in zip(delays, delays[1:])):
            raise ValueError("delays must be non-negative and strictly increasing")
        total = sum(powers)
        if total <= 0.0 or any(p < 0.0 for p in powers):
            raise ValueError("tap powers must be non-negative with positive sum")
        object.__setattr__(self, "delays_s", delays)
        object.__setattr__(self, "powers", tuple(p / total for p in powers))

    @property
    def num_taps(self) -> int:
        return len(self.delays_s)

    @property
    def max_delay_s(self) -> float:
        return self.delays_s[-1]

    @classmethod
    def from_text(cls, text: str, name: str) -> "TapProfile":
        """Parse the ``delay_ns power_db`` line format ('#' starts a comment)."""
        delays, powers = [], []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{name}:{lineno}: expected 'delay_ns power_db', got {raw!r}")
            delay_ns, power_db = (float(p) for p in parts)
            delays.append(delay_ns * 1e-9)
            powers.append(10.0 ** (power_db / 10.0))
        return cls(name=name, delays_s=tuple(delays), powers=tuple(powers))


def load_profile(path) -> TapProfile:
    """Load a tap profile from a text file; the profile is named after the file."""
    import pathlib

    p = pathlib.Path(path)
    return TapProfile.from_text(p.read_text(), name=p.stem)


def builtin_profile(name: str) -> TapProfile:
    """One of the packaged 3GPP profiles: 'etu', 'eva' or 'epa'."""
    ref = resources.files("cellsearch.profiles").joinpath(f"{name.lower()}.txt")
    try:
        text = ref.read_text()
    except FileNotFoundError:
        raise ValueError(f"unknown built-in profile {name!r}") from None
    return TapProfile.from_text(text, name=name.lower())


def cir_length(profile: TapProfile, pulse: PulseShape, sample_rate: float) -> int:
    """CIR order L: the largest delay in samples, rounded up, plus the
    pulse support (160 for ETU at 30.72 MHz)."""
    if sample_rate <= 0.0:
        raise ValueError("sample_rate must be positive")
    return int(math.ceil(profile.max_delay_s * sample_rate)) + pulse.support


@lru_cache(maxsize=16)
def _tap_pulse_matrix(profile: TapProfile, pulse: PulseShape, sample_rate: float):
    """Sampled pulse per tap (num_taps x L) and the energy normalizer.

    Row i is the pulse centred at tap i's (generally fractional) delay,
    advanced by half the support so the CIR stays causal.  The scalar
    `norm` makes E{sum |h|^2} exactly one for gains drawn with the
    profile's powers.
    """
    length = cir_length(profile, pulse, sample_rate)
    ell = np.arange(length, dtype=float)
    delays = np.asarray(profile.delays_s, dtype=float) * sample_rate
    psi = pulse.sample(ell[None, :] - pulse.support // 2 - delays[:, None])
    powers = np.asarray(profile.powers, dtype=float)
    norm = math.sqrt(float(np.sum(powers[:, None] * psi**2)))
    psi.flags.writeable = False
    return psi, norm


def realize_channel(profile: TapProfile, pulse: PulseShape, sample_rate: float,
                    rng: np.random.Generator) -> np.ndarray:
    """Draw one sample-spaced CIR of length L.

    Tap gains are independent circularly-symmetric complex Gaussians
    with variance equal to the tap's mean power; each gain is placed at
    its fractional delay through the sampled shaping pulse.  Gains are
    scaled so the expected total CIR energy is exactly one (energy is
    normalized in expectation, not per realization, so SNR statistics
    include the fading).
    """
    psi, norm = _tap_pulse_matrix(profile, pulse, sample_rate)
    powers = np.asarray(profile.powers, dtype=float)
    raw = rng.standard_normal((profile.num_taps, 2))
    gains = (raw[:, 0] + 1j * raw[:, 1]) * np.sqrt(powers / 2.0)
    return (gains / norm) @ psi


def pulse_power_profile(profile: TapProfile, pulse: PulseShape,
                        sample_rate: float) -> np.ndarray:
    """Per-sample mean power of the CIR, ``E{|h(l)|^2}``; sums to one."""
    psi, norm = _tap_pulse_matrix(profile, pulse, sample_rate)
    powers = np.asarray(profile.powers, dtype=float)
    return (powers[:, None] * psi**2).sum(axis=0) / norm**2


def shift_to_equivalent(h: np.ndarray, theta: int, theta_max: int) -> np.ndarray:
    """Equivalent CIR ``[0_theta, h, 0_(theta_max - theta)]`` of length
    len(h) + theta_max."""
    if not 0 <= theta <= theta_max:
        raise ValueError(f"theta must be in [0, {theta_max}], got {theta}")
    h = np.asarray(h)
    return np.concatenate([np.zeros(theta, dtype=h.dtype), h,
                           np.zeros(theta_max - theta, dtype=h.dtype)])


@lru_cache(maxsize=8)
def fourier_matrix(length: int, dft_size: int = DFT_SIZE) -> np.ndarray:
    """63 x length DFT block: entry (n, l) is exp(-j 2 pi n l / N) with
    n = -31..31 on the rows (slot i holds n = i - 31)."""
    if length < 1:
        raise ValueError("length must be >= 1")
    n = np.arange(-PSS_HALF, PSS_HALF + 1, dtype=float)[:, None]
    ell = np.arange(length, dtype=float)[None, :]
    f = np.exp(-2j * np.pi * n * ell / dft_size)
    f.flags.writeable = False
    return f


def cfr(h_eq: np.ndarray, fmat: np.ndarray) -> np.ndarray:
    """Channel frequency response over the PSS subcarriers, ``F @ h_eq``."""
    h_eq = np.asarray(h_eq)
    if fmat.ndim != 2 or fmat.shape[0] != 2 * PSS_HALF + 1:
        raise ValueError(f"Fourier matrix must be 63 x L_eq, got {fmat.shape}")
    if h_eq.shape != (fmat.shape[1],):
        raise ValueError(f"CIR length {h_eq.shape} does not match matrix {fmat.shape}")
    return fmat @ h_eq


def uniform_theta_prior(theta_max: int) -> dict:
    """Uniform weights over the timing errors {0, ..., theta_max}."""
    if theta_max < 0:
        raise ValueError("theta_max must be >= 0")
    w = 1.0 / (theta_max + 1)
    return {theta: w for theta in range(theta_max + 1)}


def build_cir_covariance(profile: TapProfile, pulse: PulseShape,
                         theta_prior: Mapping[int, float], theta_max: int,
                         sample_rate: float = SAMPLE_RATE) -> np.ndarray:
    """Covariance of the equivalent CIR under a timing-error prior.

    Taps are modeled as uncorrelated, so the covariance conditioned on a
    timing error theta is diagonal, carrying the pulse-shaped power
    profile shifted down by theta; the returned L_eq x L_eq matrix is
    the prior-weighted mixture.  Hermitian PSD with unit trace for a
    normalized profile.
    """
    if not theta_prior:
        raise ValueError("theta prior must contain at least one entry")
    weights = {int(t): float(w) for t, w in theta_prior.items()}
    if any(not 0 <= t <= theta_max for t in weights):
        raise ValueError("theta prior support must lie in [0, theta_max]")
    total = sum(weights.values())
    if not math.isclose(total, 1.0, rel_tol=0.0, abs_tol=1e-9):
        raise ValueError(f"theta prior weights must sum to 1, got {total}")
    power = pulse_power_profile(profile, pulse, sample_rate)
    length = power.shape[0]
    diag = np.zeros(length + theta_max)
    for theta, w in weights.items():
        diag[theta:theta + length] += w * power
    return np.diag(diag).astype(complex)
