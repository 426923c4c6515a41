"""Monte Carlo harness: pairing, determinism, rates and the flop models."""

import io

import numpy as np
import pytest

from cellsearch.harness import (DetectorSpec, SweepConfig, build_detector,
                                flops_estimate, run_sweep, run_trial, trial_rng,
                                wilson_interval, write_sweep_csv)
from cellsearch.simulator import SimScenario


def tiny_scenario(**kwargs) -> SimScenario:
    defaults = dict(snr_db=10.0, n_q=12, seed=11)
    defaults.update(kwargs)
    return SimScenario(**defaults)


# ---------------------------------------------------------------- flops

def test_flops_published_operating_point():
    assert flops_estimate("ammse", 7, 5) == 60_393
    assert flops_estimate("prr", 7, 5) == 34_353
    assert flops_estimate("pcrr", 7, 5) == 11_001
    assert flops_estimate("cfdc", 7) == 10_749
    assert flops_estimate("dd", 7) == 13_248  # ~13 kflops


def test_flops_rank_handling():
    assert flops_estimate("cfdc", 7, 99) == flops_estimate("cfdc", 7)
    assert flops_estimate("dd", 7, 1) == flops_estimate("dd", 7)
    assert flops_estimate("mmse", 7, 5) == flops_estimate("ammse", 7, 5)
    with pytest.raises(ValueError):
        flops_estimate("ammse", 7)
    with pytest.raises(ValueError):
        flops_estimate("fft", 7, 5)
    with pytest.raises(ValueError):
        flops_estimate("dd", 0)


# ---------------------------------------------------------------- intervals

def test_wilson_interval_basics():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0.0 < hi < 0.06
    lo, hi = wilson_interval(100, 100)
    assert hi == pytest.approx(1.0, abs=1e-12) and lo > 0.94
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert (lo + hi) / 2 == pytest.approx(0.5, abs=1e-9)


# ---------------------------------------------------------------- trials

def test_trial_rng_is_pure():
    a = trial_rng(3, 17).standard_normal(4)
    b = trial_rng(3, 17).standard_normal(4)
    c = trial_rng(3, 18).standard_normal(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def build_pair(scenario):
    specs = (DetectorSpec("ammse", 5), DetectorSpec("cfdc"))
    return [(s, build_detector(s, scenario)) for s in specs]


def test_run_trial_is_paired_and_deterministic():
    scenario = tiny_scenario()
    configs = build_pair(scenario)
    first = run_trial(scenario, configs, trial_index=4)
    again = run_trial(scenario, configs, trial_index=4)
    assert first == again
    assert len(first) == 2
    assert first[0].window_hash == first[1].window_hash  # same realization
    other = run_trial(scenario, configs, trial_index=5)
    assert other[0].window_hash != first[0].window_hash


def test_run_trial_perfect_at_infinite_snr():
    scenario = tiny_scenario(snr_db=np.inf)
    configs = [(DetectorSpec("ammse", 5), build_detector(DetectorSpec("ammse", 5), scenario))]
    for t in range(5):
        (outcome,) = run_trial(scenario, configs, t)
        assert outcome.hit_q and outcome.hit_root and outcome.hit_nu and outcome.hit_all


# ---------------------------------------------------------------- sweeps

def small_sweep(**kwargs) -> SweepConfig:
    defaults = dict(axis="snr", values=(2.0, 12.0), trials=40,
                    detectors=(DetectorSpec("ammse", 5), DetectorSpec("cfdc")),
                    scenario=tiny_scenario(), master_seed=21, jobs=1)
    defaults.update(kwargs)
    return SweepConfig(**defaults)


def test_sweep_rate_consistency():
    records = run_sweep(small_sweep())
    assert len(records) == 4
    for r in records:
        assert r.p_f >= max(r.p_q, r.p_u, r.p_nu) - 1e-12  # failure is the union event
        for value in (r.p_q, r.p_u, r.p_nu, r.p_f):
            assert 0.0 <= value <= 1.0
        assert r.trials == 40 and r.seed == 21


def test_sweep_csv_bytes_deterministic():
    def render():
        buf = io.StringIO()
        write_sweep_csv(run_sweep(small_sweep()), buf, metadata={"profile": "etu"})
        return buf.getvalue()

    first, second = render(), render()
    assert first == second
    lines = first.splitlines()
    assert lines[0] == "# profile=etu"
    assert lines[1] == "axis,detector,P,p_q,p_u,p_nu,p_f,ci95,trials,seed"
    assert len(lines) == 2 + 4
    assert lines[2].startswith("2,ammse,5,")
    assert ",cfdc,," in lines[3]  # rank column empty for basis-free kinds


def test_sweep_jobs_do_not_change_results():
    serial = run_sweep(small_sweep(jobs=1, trials=24))
    parallel = run_sweep(small_sweep(jobs=2, trials=24))
    assert serial == parallel


def test_sweep_p_axis_rebuilds_detectors():
    config = small_sweep(axis="p", values=(1, 5), trials=10,
                         detectors=(DetectorSpec("ammse"), DetectorSpec("dd")))
    records = run_sweep(config)
    by_kind = {(r.detector, r.axis_value): r for r in records}
    assert by_kind[("ammse", 1.0)].rank == 1
    assert by_kind[("ammse", 5.0)].rank == 5
    assert by_kind[("dd", 1.0)].rank is None


def test_sweep_theta_axis():
    config = small_sweep(axis="theta", values=(0, 40), trials=10,
                         detectors=(DetectorSpec("dd"),))
    records = run_sweep(config)
    assert [r.axis_value for r in records] == [0.0, 40.0]


def test_mmse_detector_spec_builds():
    scenario = tiny_scenario()
    config = build_detector(DetectorSpec("mmse", 4), scenario)
    assert config.kind == "mmse" and config.basis.rank == 4


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        small_sweep(axis="gain")
    with pytest.raises(ValueError):
        small_sweep(values=())
    with pytest.raises(ValueError):
        small_sweep(trials=0)
    with pytest.raises(ValueError):
        small_sweep(detectors=())
