"""Command-line entry point.

One binary, subcommand style::

    cellsearch zc --root 25
    cellsearch simulate --snr 8 --theta 40 --seed 7 --out win.csv
    cellsearch detect --window win.csv --kind ammse --p 5
    cellsearch basis-mse --kind ammse --p-range 2..12
    cellsearch sweep-p --snr 8 --theta 40 --p 1..12 --trials 2000 --seed 7
    cellsearch sweep-snr --snr 6,8,10 --theta 40 --trials 2000
    cellsearch sweep-theta --theta 0,10,20,40 --snr 8 --trials 2000
    cellsearch flops --kind ammse --nnu 7 --p 5

Defaults follow the 20 MHz extended-CP configuration: N = 2048 DFT bins,
N_Q = 60 symbols per window, theta_max = 40 samples, IFO search set
{0, +-1, +-2, +-3}, ETU channel profile, rank P = 5.

Exit codes: 0 on success, 1 on domain or numeric errors, 2 on usage
errors.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys

import numpy as np

from . import __version__
from .channel import (build_cir_covariance, builtin_profile, cir_length,
                      fourier_matrix, load_profile, uniform_theta_prior)
from .detector import (DEFAULT_IFO_SET, DetectorConfig, detect,
                       read_window_csv, write_window_csv)
from .harness import (DEFAULT_RANK, DetectorSpec, SweepConfig, build_detector,
                      flops_estimate, run_sweep, write_sweep_csv)
from .rankbasis import KINDS as BASIS_KINDS
from .rankbasis import ammse_basis, mse_of_basis, mmse_basis, pcrr_basis, prr_basis
from .simulator import SimScenario, simulate_window
from .zc import ZC_ROOTS, generate_pss

_SWEEP_DETECTOR_DEFAULT = "ammse,prr,pcrr,cfdc,dd"


def _parse_values(text: str, cast=float):
    """Axis values: a single number, a comma list, or an a..b integer range."""
    text = text.strip()
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise ValueError(f"empty range {text!r}")
        return [cast(v) for v in range(lo, hi + 1)]
    return [cast(part) for part in text.split(",") if part.strip()]


def _resolve_profile(name_or_path: str):
    if name_or_path.lower() in ("etu", "eva", "epa"):
        return builtin_profile(name_or_path)
    return load_profile(name_or_path)


@contextlib.contextmanager
def _open_out(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _fixed_or_random(text: str) -> int | None:
    return None if text.lower() == "random" else int(text)


def _add_scenario_flags(sub, with_snr_default=True, random_truth=False):
    truth_default = "random" if random_truth else None
    sub.add_argument("--theta", default="40", help="residual timing error in samples (default 40)")
    sub.add_argument("--theta-max", type=int, default=40, help="timing error bound (default 40)")
    sub.add_argument("--nu", default=truth_default or "0",
                     help="true integer frequency offset, or 'random' "
                          f"(default {truth_default or 0})")
    sub.add_argument("--root", default=truth_default or "25",
                     help="true ZC root in {25,29,34}, or 'random' "
                          f"(default {truth_default or 25})")
    sub.add_argument("--q", type=int, default=None, help="PSS symbol position; omit for uniform random")
    sub.add_argument("--nq", type=int, default=60, help="window length in symbols (default 60)")
    sub.add_argument("--profile", default="etu", help="built-in profile name or path (default etu)")
    sub.add_argument("--dft-size", type=int, default=2048, help="receive DFT size (default 2048)")
    if with_snr_default:
        sub.add_argument("--snr", default="8", help="SNR in dB (default 8)")


def _scenario_from(args, snr_db: float, theta: int) -> SimScenario:
    return SimScenario(snr_db=snr_db, theta=theta, theta_max=args.theta_max,
                       nu=_fixed_or_random(args.nu), root=_fixed_or_random(args.root),
                       q=args.q, n_q=args.nq,
                       profile=_resolve_profile(args.profile),
                       dft_size=args.dft_size, seed=args.seed)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cellsearch",
        description="Frequency-domain LTE PSS detection, sector identification "
                    "and integer frequency-offset recovery.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p_zc = subs.add_parser("zc", help="dump one primary sequence as CSV n,re,im")
    p_zc.add_argument("--root", type=int, required=True, choices=ZC_ROOTS)
    p_zc.add_argument("--out", default=None, help="output path (default stdout)")

    p_sim = subs.add_parser("simulate", help="synthesize one window file plus a metadata sidecar")
    _add_scenario_flags(p_sim)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", default=None, help="window CSV path (default stdout)")
    p_sim.add_argument("--meta", default=None,
                       help="metadata JSON path (default <out>.meta.json when --out is set)")

    p_det = subs.add_parser("detect", help="run one detector over a window file")
    p_det.add_argument("--window", required=True, help="window CSV path ('-' for stdin)")
    p_det.add_argument("--kind", default="ammse",
                       choices=("mmse", "ammse", "prr", "pcrr", "cfdc", "dd"))
    p_det.add_argument("--p", type=int, default=DEFAULT_RANK, help="expansion rank (default 5)")
    p_det.add_argument("--theta-max", type=int, default=40)
    p_det.add_argument("--profile", default="etu", help="profile for the mmse basis (default etu)")
    p_det.add_argument("--dft-size", type=int, default=2048)
    p_det.add_argument("--table", default=None, help="also dump the full metric table CSV here")
    p_det.add_argument("--out", default=None, help="estimate output path (default stdout)")

    p_mse = subs.add_parser("basis-mse", help="representation error vs rank, CSV kind,P,mse")
    p_mse.add_argument("--kind", required=True, choices=BASIS_KINDS)
    p_mse.add_argument("--p-range", required=True, help="ranks, e.g. 2..12 or 1,5,8")
    p_mse.add_argument("--profile", default="etu")
    p_mse.add_argument("--theta-max", type=int, default=40)
    p_mse.add_argument("--dft-size", type=int, default=2048)
    p_mse.add_argument("--out", default=None)

    for axis, help_text in (("snr", "failure rates vs SNR"),
                            ("theta", "failure rates vs timing error"),
                            ("p", "failure rates vs expansion rank")):
        p_sw = subs.add_parser(f"sweep-{axis}", help=help_text)
        _add_scenario_flags(p_sw, with_snr_default=(axis != "snr"), random_truth=True)
        if axis == "snr":
            p_sw.add_argument("--snr", required=True, help="swept SNR values, e.g. 4..12 or 6,8,10")
        p_sw.add_argument("--p", default=str(DEFAULT_RANK),
                          help="expansion rank(s); swept for sweep-p (default 5)")
        p_sw.add_argument("--trials", type=int, default=2000)
        p_sw.add_argument("--detectors",
                          default="ammse" if axis == "p" else _SWEEP_DETECTOR_DEFAULT,
                          help="comma list of detector kinds")
        p_sw.add_argument("--seed", type=int, default=0)
        p_sw.add_argument("--jobs", type=int, default=None,
                          help="worker processes (default: available parallelism)")
        p_sw.add_argument("--out", default=None)
        p_sw.set_defaults(axis=axis)

    p_fl = subs.add_parser("flops", help="flop-count model per OFDM symbol")
    p_fl.add_argument("--kind", required=True,
                      choices=("mmse", "ammse", "prr", "pcrr", "cfdc", "dd"))
    p_fl.add_argument("--nnu", type=int, required=True, help="IFO search-set size")
    p_fl.add_argument("--p", type=int, default=None, help="expansion rank")

    return parser


def _cmd_zc(args) -> int:
    seq = generate_pss(args.root)
    with _open_out(args.out) as fh:
        fh.write("n,re,im\n")
        for i, v in enumerate(seq.samples):
            fh.write(f"{i - 31},{v.real:.17g},{v.imag:.17g}\n")
    return 0


def _cmd_simulate(args) -> int:
    scenario = _scenario_from(args, snr_db=float(args.snr), theta=int(args.theta))
    rng = np.random.default_rng(np.random.SeedSequence((scenario.seed, 0)))
    window, truth, _ = simulate_window(scenario, rng)
    with _open_out(args.out) as fh:
        write_window_csv(window, fh)
    meta_path = args.meta
    if meta_path is None and args.out not in (None, "-"):
        meta_path = args.out + ".meta.json"
    if meta_path is not None:
        meta = scenario.metadata()
        meta["truth"] = {"q": truth.q, "root": truth.root, "nu": truth.nu}
        meta["theta_prior"] = "uniform over [0, theta_max] (mmse basis design)"
        with open(meta_path, "w") as fh:
            json.dump(meta, fh, indent=2, default=str)
            fh.write("\n")
    return 0


def _cmd_detect(args) -> int:
    if args.window == "-":
        window = read_window_csv(sys.stdin)
    else:
        with open(args.window) as fh:
            window = read_window_csv(fh)
    if args.kind in ("cfdc", "dd"):
        config = DetectorConfig(kind=args.kind)
    elif args.kind == "mmse":
        scenario = SimScenario(snr_db=8.0, theta_max=args.theta_max,
                               profile=_resolve_profile(args.profile),
                               dft_size=args.dft_size)
        config = build_detector(DetectorSpec("mmse", args.p), scenario)
    else:
        basis = {"ammse": lambda: ammse_basis(args.p, dft_size=args.dft_size),
                 "prr": lambda: prr_basis(args.p),
                 "pcrr": lambda: pcrr_basis(args.p)}[args.kind]()
        config = DetectorConfig(kind=args.kind, basis=basis)
    result = detect(window, config, return_table=args.table is not None)
    with _open_out(args.out) as fh:
        fh.write("q,root,nu,metric\n")
        est = result.estimate
        fh.write(f"{est.q},{est.root},{est.nu},{result.metric_value:.10g}\n")
    if args.table is not None:
        with open(args.table, "w") as fh:
            fh.write("q,u,nu,metric\n")
            table = result.metric_table
            for qi in range(table.shape[0]):
                for ri, root in enumerate(ZC_ROOTS):
                    for ji, nu in enumerate(config.ifo_set):
                        fh.write(f"{qi + 1},{root},{nu},{table[qi, ri, ji]:.10g}\n")
    return 0


def _cmd_basis_mse(args) -> int:
    ranks = _parse_values(args.p_range, cast=int)
    profile = _resolve_profile(args.profile)
    from .channel import PulseShape
    pulse = PulseShape()
    c_eq = build_cir_covariance(profile, pulse, uniform_theta_prior(args.theta_max),
                                args.theta_max)
    length = cir_length(profile, pulse, 30.72e6)
    fmat = fourier_matrix(length + args.theta_max, args.dft_size)
    with _open_out(args.out) as fh:
        fh.write(f"# profile={profile.name} theta_prior=uniform[0..{args.theta_max}]\n")
        fh.write("kind,P,mse\n")
        for p in ranks:
            if args.kind == "mmse":
                basis = mmse_basis(c_eq, fmat, p)
            elif args.kind == "ammse":
                basis = ammse_basis(p, dft_size=args.dft_size)
            elif args.kind == "prr":
                basis = prr_basis(p)
            else:
                basis = pcrr_basis(p)
            fh.write(f"{args.kind},{p},{mse_of_basis(basis, c_eq, fmat):.10g}\n")
    return 0


def _cmd_sweep(args) -> int:
    if args.axis == "snr":
        values = _parse_values(args.snr, cast=float)
        snr, theta = values[0], int(args.theta)
    elif args.axis == "theta":
        values = _parse_values(args.theta, cast=int)
        snr, theta = float(args.snr), values[0]
    else:
        values = _parse_values(args.p, cast=int)
        snr, theta = float(args.snr), int(args.theta)
    scenario = _scenario_from(args, snr_db=snr, theta=theta)
    rank = None if args.axis == "p" else _parse_values(args.p, cast=int)[0]
    detectors = tuple(DetectorSpec(kind.strip(), rank)
                      for kind in args.detectors.split(",") if kind.strip())
    config = SweepConfig(axis=args.axis, values=tuple(values), trials=args.trials,
                         detectors=detectors, scenario=scenario,
                         master_seed=args.seed, jobs=args.jobs)
    records = run_sweep(config)
    meta = scenario.metadata()
    meta.update(axis=args.axis, trials=args.trials, master_seed=args.seed,
                ifo_set=list(DEFAULT_IFO_SET),
                theta_prior="uniform over [0, theta_max] (mmse basis design)")
    with _open_out(args.out) as fh:
        write_sweep_csv(records, fh, metadata=meta)
    return 0


def _cmd_flops(args) -> int:
    print(flops_estimate(args.kind, args.nnu, args.p))
    return 0


_COMMANDS = {
    "zc": _cmd_zc,
    "simulate": _cmd_simulate,
    "detect": _cmd_detect,
    "basis-mse": _cmd_basis_mse,
    "sweep-snr": _cmd_sweep,
    "sweep-theta": _cmd_sweep,
    "sweep-p": _cmd_sweep,
    "flops": _cmd_flops,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, np.linalg.LinAlgError, OSError) as exc:
        print(f"cellsearch: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
