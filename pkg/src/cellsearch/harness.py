"""Monte Carlo error-rate estimation and parameter sweeps.

Trials are paired: every detector in a sweep scores the same simulated
window, and per-trial generators are derived from (master seed, trial
index), so results are reproducible bit for bit and independent of the
worker count.  Sweeps over SNR or timing error reuse the same per-trial
randomness at each axis point (common random numbers), which sharpens
ordering comparisons at modest trial counts.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import hashlib
import os
from dataclasses import dataclass

import numpy as np

from .channel import build_cir_covariance, cir_length, fourier_matrix, uniform_theta_prior
from .detector import DEFAULT_IFO_SET, DetectorConfig, detect
from .rankbasis import ammse_basis, mmse_basis, pcrr_basis, prr_basis
from .simulator import SimScenario, simulate_window

#: Sweepable axes.
AXES = ("snr", "theta", "p")

#: Default expansion rank (the error-rate sweet spot of the P sweep).
DEFAULT_RANK = 5


@dataclass(frozen=True)
class DetectorSpec:
    """A detector kind plus the expansion rank for the reduced-rank kinds
    (ignored by the correlator and differential baselines)."""

    kind: str
    p: int | None = None

    def resolved_rank(self) -> int | None:
        if self.kind in ("cfdc", "dd"):
            return None
        return DEFAULT_RANK if self.p is None else int(self.p)


@dataclass(frozen=True)
class SweepConfig:
    """One sweep: an axis, its values, the detectors to score, the base
    scenario and the master seed.  ``jobs`` caps worker processes (None
    means the available parallelism)."""

    axis: str
    values: tuple
    trials: int
    detectors: tuple
    scenario: SimScenario
    master_seed: int = 0
    jobs: int | None = None

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.values:
            raise ValueError("values must not be empty")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not self.detectors:
            raise ValueError("at least one detector is required")
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "detectors", tuple(self.detectors))


@dataclass(frozen=True)
class TrialOutcome:
    """Scoring of one detector on one simulated window."""

    detector: str
    rank: int | None
    hit_q: bool
    hit_root: bool
    hit_nu: bool
    window_hash: str

    @property
    def hit_all(self) -> bool:
        return self.hit_q and self.hit_root and self.hit_nu


@dataclass(frozen=True)
class ErrorRates:
    """Error rates of one detector at one axis point, with a 95% Wilson
    half-width for the failure rate."""

    axis: str
    axis_value: float
    detector: str
    rank: int | None
    p_q: float
    p_u: float
    p_nu: float
    p_f: float
    ci95: float
    trials: int
    seed: int


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Independent generator for one trial, a pure function of the seeds."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, trial_index)))


def wilson_interval(errors: int, trials: int, z: float = 1.96):
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * np.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


def _mmse_key(scenario: SimScenario):
    return (scenario.profile, scenario.pulse, scenario.sample_rate,
            scenario.theta_max, scenario.dft_size)


_MMSE_CACHE: dict = {}


def _mmse_basis_for(scenario: SimScenario, p: int):
    """Covariance-matched basis for a scenario geometry, built with a
    uniform timing-error prior over [0, theta_max] (recorded in sweep
    metadata) and cached per geometry."""
    key = (_mmse_key(scenario), p)
    if key not in _MMSE_CACHE:
        c_eq = build_cir_covariance(scenario.profile, scenario.pulse,
                                    uniform_theta_prior(scenario.theta_max),
                                    scenario.theta_max, scenario.sample_rate)
        length = cir_length(scenario.profile, scenario.pulse, scenario.sample_rate)
        fmat = fourier_matrix(length + scenario.theta_max, scenario.dft_size)
        _MMSE_CACHE[key] = mmse_basis(c_eq, fmat, p)
    return _MMSE_CACHE[key]


def build_detector(spec: DetectorSpec, scenario: SimScenario,
                   ifo_set=DEFAULT_IFO_SET) -> DetectorConfig:
    """Instantiate a detector for a scenario geometry."""
    rank = spec.resolved_rank()
    if spec.kind == "ammse":
        basis = ammse_basis(rank, dft_size=scenario.dft_size)
    elif spec.kind == "prr":
        basis = prr_basis(rank)
    elif spec.kind == "pcrr":
        basis = pcrr_basis(rank)
    elif spec.kind == "mmse":
        basis = _mmse_basis_for(scenario, rank)
    else:
        basis = None
    return DetectorConfig(kind=spec.kind, basis=basis, ifo_set=tuple(ifo_set))


def window_fingerprint(window: np.ndarray) -> str:
    """Short stable digest of a window, for paired-trial bookkeeping."""
    return hashlib.blake2b(np.ascontiguousarray(window).tobytes(),
                           digest_size=8).hexdigest()


def run_trial(scenario: SimScenario, configs, trial_index: int):
    """Simulate one window and score it with every detector.

    ``configs`` is a sequence of (DetectorSpec, DetectorConfig) pairs;
    the window is shared so the comparison is paired.
    """
    rng = trial_rng(scenario.seed, trial_index)
    window, truth, _ = simulate_window(scenario, rng)
    digest = window_fingerprint(window)
    outcomes = []
    for spec, config in configs:
        est = detect(window, config).estimate
        outcomes.append(TrialOutcome(
            detector=spec.kind, rank=spec.resolved_rank(),
            hit_q=est.q == truth.q, hit_root=est.root == truth.root,
            hit_nu=est.nu == truth.nu, window_hash=digest))
    return outcomes


def _trial_block(payload):
    scenario, configs, indices = payload
    counts = np.zeros((len(configs), 4), dtype=np.int64)
    for t in indices:
        for d, outcome in enumerate(run_trial(scenario, configs, t)):
            counts[d, 0] += not outcome.hit_q
            counts[d, 1] += not outcome.hit_root
            counts[d, 2] += not outcome.hit_nu
            counts[d, 3] += not outcome.hit_all
    return counts


def _scenario_at(config: SweepConfig, value) -> SimScenario:
    base = dataclasses.replace(config.scenario, seed=config.master_seed)
    if config.axis == "snr":
        return dataclasses.replace(base, snr_db=float(value))
    if config.axis == "theta":
        return dataclasses.replace(base, theta=int(value))
    return base


def _specs_at(config: SweepConfig, value):
    if config.axis != "p":
        return config.detectors
    return tuple(spec if spec.kind in ("cfdc", "dd")
                 else dataclasses.replace(spec, p=int(value))
                 for spec in config.detectors)


def _error_counts(config: SweepConfig, scenario, configs, jobs: int) -> np.ndarray:
    indices = np.arange(config.trials)
    if jobs <= 1 or config.trials < 4:
        return _trial_block((scenario, configs, indices))
    chunks = [(scenario, configs, block)
              for block in np.array_split(indices, min(jobs * 4, config.trials))]
    counts = np.zeros((len(configs), 4), dtype=np.int64)
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        for block_counts in pool.map(_trial_block, chunks):
            counts += block_counts
    return counts


def run_sweep(config: SweepConfig):
    """Run the sweep and return one ErrorRates record per (value, detector)."""
    jobs = config.jobs if config.jobs is not None else (os.cpu_count() or 1)
    records = []
    for value in config.values:
        scenario = _scenario_at(config, value)
        specs = _specs_at(config, value)
        configs = [(spec, build_detector(spec, scenario)) for spec in specs]
        counts = _error_counts(config, scenario, configs, jobs)
        for d, (spec, _) in enumerate(configs):
            lo, hi = wilson_interval(int(counts[d, 3]), config.trials)
            records.append(ErrorRates(
                axis=config.axis, axis_value=float(value), detector=spec.kind,
                rank=spec.resolved_rank(),
                p_q=counts[d, 0] / config.trials, p_u=counts[d, 1] / config.trials,
                p_nu=counts[d, 2] / config.trials, p_f=counts[d, 3] / config.trials,
                ci95=(hi - lo) / 2.0, trials=config.trials, seed=config.master_seed))
    return records


def write_sweep_csv(records, fh, metadata=None) -> None:
    """Sweep CSV: '#'-prefixed metadata lines, a header row, then one
    record per line (rank column empty for the basis-free detectors)."""
    for key, value in (metadata or {}).items():
        fh.write(f"# {key}={value}\n")
    fh.write("axis,detector,P,p_q,p_u,p_nu,p_f,ci95,trials,seed\n")
    for r in records:
        rank = "" if r.rank is None else r.rank
        fh.write(f"{r.axis_value:g},{r.detector},{rank},{r.p_q:.10g},{r.p_u:.10g},"
                 f"{r.p_nu:.10g},{r.p_f:.10g},{r.ci95:.10g},{r.trials},{r.seed}\n")


#: Per-symbol flop-count models (N_nu = IFO search-set size, P = rank).
_FLOPS = {
    "ammse": lambda n, p: 291 + 1116 * n + 1494 * n * p,
    "mmse": lambda n, p: 291 + 1116 * n + 1494 * n * p,
    "prr": lambda n, p: 291 + 1116 * n + 750 * n * p,
    "pcrr": lambda n, p: 291 + 1485 * n + 9 * n * p,
    "cfdc": lambda n, p: 291 + 1494 * n,
    "dd": lambda n, p: 291 + (372 + 245) * 3 * n,
}


def flops_estimate(kind: str, n_nu: int, p: int | None = None) -> int:
    """Documentation-grade flop count per received OFDM symbol.

    These are the published complexity models, not measurements; the
    rank is ignored by the correlator and differential detectors.
    """
    if kind not in _FLOPS:
        raise ValueError(f"kind must be one of {tuple(_FLOPS)}, got {kind!r}")
    if n_nu < 1:
        raise ValueError(f"n_nu must be >= 1, got {n_nu}")
    if kind in ("ammse", "mmse", "prr", "pcrr"):
        if p is None or p < 1:
            raise ValueError(f"kind {kind!r} requires a positive rank P")
    return int(_FLOPS[kind](int(n_nu), 0 if p is None else int(p)))
