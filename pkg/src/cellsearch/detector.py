"""Joint PSS-position / sector-root / integer-frequency-offset detection.

The observation is a stack of N_Q frequency-domain symbols, each holding
the 73 synchronization-subband bins n = -36..36 (row k, array column
j = n + 36).  For a hypothesis (q, u, nu) the despread sequence
``z(m) = X_q(m + nu) conj(a_u(m))`` collapses the PSS modulation, and
each detector scores the hypothesis by how much of z's energy its
channel model explains, normalized by the full 73-bin symbol energy
||X_q||^2.  The per-symbol metric functions here are the reference
(scalar) forms; ``detect`` scans the whole hypothesis grid through the
kernels in ``cellsearch._core``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _core
from .rankbasis import ExpansionBasis
from .zc import PSS_HALF, PSS_LEN, SCH_BINS, SCH_HALF, ZC_ROOTS, generate_pss

#: Despread shifts must keep m + nu inside the 73-bin subband.
MAX_ABS_IFO = 5

#: Default search set for the integer frequency offset.
DEFAULT_IFO_SET = (-3, -2, -1, 0, 1, 2, 3)

#: Detector kinds backed by an expansion basis.
PROJECTED_KINDS = ("mmse", "ammse", "prr", "pcrr")

#: All detector kinds.
DETECTOR_KINDS = PROJECTED_KINDS + ("cfdc", "dd")


@dataclass(frozen=True)
class Hypothesis:
    """One point (q, u, nu) of the search grid; q is 1-based."""

    q: int
    root: int
    nu: int


@dataclass(frozen=True)
class DetectorConfig:
    """A detector kind plus its basis (for the reduced-rank kinds) and
    the integer-frequency-offset search set (stored sorted ascending)."""

    kind: str
    basis: ExpansionBasis | None = None
    ifo_set: tuple = DEFAULT_IFO_SET

    def __post_init__(self):
        if self.kind not in DETECTOR_KINDS:
            raise ValueError(f"kind must be one of {DETECTOR_KINDS}, got {self.kind!r}")
        if self.kind in PROJECTED_KINDS:
            if self.basis is None:
                raise ValueError(f"detector kind {self.kind!r} requires a basis")
            if self.basis.kind != self.kind:
                raise ValueError(f"basis kind {self.basis.kind!r} does not match "
                                 f"detector kind {self.kind!r}")
            if self.kind == "pcrr" and self.basis.partition is None:
                raise ValueError("pcrr detector requires a partitioned basis")
        elif self.basis is not None:
            raise ValueError(f"detector kind {self.kind!r} takes no basis")
        ifo = tuple(sorted(set(int(nu) for nu in self.ifo_set)))
        if not ifo:
            raise ValueError("ifo_set must not be empty")
        if any(abs(nu) > MAX_ABS_IFO for nu in ifo):
            raise ValueError(f"ifo_set entries must satisfy |nu| <= {MAX_ABS_IFO}")
        object.__setattr__(self, "ifo_set", ifo)

    @property
    def label(self) -> str:
        return self.kind


@dataclass(frozen=True)
class DetectionResult:
    """Winning hypothesis, its metric value and (optionally) the full
    metric table indexed [q - 1, root_index, nu_index] with roots in
    (25, 29, 34) order and nu ascending."""

    estimate: Hypothesis
    metric_value: float
    metric_table: np.ndarray | None = field(default=None, repr=False)


@lru_cache(maxsize=4)
def _pss_conj_stack() -> np.ndarray:
    stack = np.stack([np.conj(generate_pss(u).samples) for u in ZC_ROOTS])
    stack.flags.writeable = False
    return stack


def _check_symbol(x_q: np.ndarray) -> np.ndarray:
    x_q = np.asarray(x_q, dtype=complex)
    if x_q.shape != (SCH_BINS,):
        raise ValueError(f"symbol must hold {SCH_BINS} bins, got shape {x_q.shape}")
    return x_q


def _symbol_power(x_q: np.ndarray) -> float:
    power = float(np.sum(np.abs(x_q) ** 2))
    if power == 0.0:
        raise ValueError("all-zero symbol row (impossible under the model)")
    return power


def _root_index(root: int) -> int:
    if root not in ZC_ROOTS:
        raise ValueError(f"root must be one of {ZC_ROOTS}, got {root!r}")
    return ZC_ROOTS.index(root)


def despread(x_q: np.ndarray, root: int, nu: int) -> np.ndarray:
    """Despread sequence z(m) = X_q(m + nu) conj(a_root(m)), m = -31..31.

    z(0) is always zero because the PSS has a DC null.
    """
    x_q = _check_symbol(x_q)
    if abs(nu) > MAX_ABS_IFO:
        raise ValueError(f"|nu| must be <= {MAX_ABS_IFO}, got {nu}")
    offset = nu + SCH_HALF - PSS_HALF
    return x_q[offset:offset + PSS_LEN] * _pss_conj_stack()[_root_index(root)]


def metric_reduced_rank(x_q: np.ndarray, basis: ExpansionBasis, root: int, nu: int) -> float:
    """Concentrated likelihood z^H G z / ||x||^2, evaluated through the
    basis combiner as ||W z||^2 / ||x||^2."""
    x_q = _check_symbol(x_q)
    z = despread(x_q, root, nu)
    return float(np.sum(np.abs(basis.combiner @ z) ** 2)) / _symbol_power(x_q)


def metric_pcrr(x_q: np.ndarray, partition, root: int, nu: int) -> float:
    """Partial-correlation metric: coherent subband sums |sum z|^2 / K_p,
    totalled and normalized by the symbol energy."""
    partition = tuple(int(k) for k in partition)
    if sum(partition) != PSS_LEN or any(k < 1 for k in partition):
        raise ValueError(f"partition must be positive sizes summing to {PSS_LEN}")
    z = despread(x_q, root, nu)
    total, start = 0.0, 0
    for size in partition:
        total += abs(z[start:start + size].sum()) ** 2 / size
        start += size
    return total / _symbol_power(np.asarray(x_q, dtype=complex))


def metric_cfdc(x_q: np.ndarray, root: int, nu: int) -> float:
    """Plain frequency-domain correlator |sum_m z(m)|^2 / (63 ||x||^2):
    the single-subband case of the partial correlator."""
    return metric_pcrr(x_q, (PSS_LEN,), root, nu)


def metric_dd(x_q: np.ndarray, root: int, nu: int) -> float:
    """Differential detector Re{sum_n z(n) conj(z(n-1))} / ||x||^2.

    The products adjacent to DC vanish automatically through z(0) = 0;
    pairwise differences cancel any common phase ramp, which is what
    buys the timing-error robustness of this baseline.
    """
    x_q = _check_symbol(x_q)
    z = despread(x_q, root, nu)
    return float(np.real(z[1:] @ z[:-1].conj())) / _symbol_power(x_q)


def estimate_expansion_coeffs(x_q: np.ndarray, basis: ExpansionBasis,
                              root: int, nu: int) -> np.ndarray:
    """Least-squares expansion coefficients (B^H B)^-1 B^H z for the
    hypothesis; plugging them back into the quadratic objective
    reproduces the concentrated metric."""
    z = despread(x_q, root, nu)
    b = basis.matrix
    gram = b.conj().T @ b
    return np.linalg.solve(gram, b.conj().T @ z)


def model_residual(x_q: np.ndarray, basis: ExpansionBasis, root: int, nu: int) -> float:
    """Residual energy sum_n |X_q(n) - s(n)|^2 over all 73 bins for the
    fitted signal s(n) = H(n - nu) a_root(n - nu) with H = B xi_hat.

    The 11 bins never reached by the PSS support contribute their raw
    energy; this is the quantity whose 1/73 scaling estimates the noise
    power on the PSS symbol.
    """
    x_q = _check_symbol(x_q)
    xi = estimate_expansion_coeffs(x_q, basis, root, nu)
    h_fit = basis.matrix @ xi
    fitted = np.zeros(SCH_BINS, dtype=complex)
    offset = nu + SCH_HALF - PSS_HALF
    pss = np.conj(_pss_conj_stack()[_root_index(root)])
    fitted[offset:offset + PSS_LEN] = h_fit * pss
    return float(np.sum(np.abs(x_q - fitted) ** 2))


def estimate_noise_vars(window: np.ndarray, q_hat: int, residual: float):
    """Concentrated noise estimates: per-symbol powers ||X_k||^2 / 73 for
    k != q_hat (the q_hat slot is NaN) and the PSS-symbol noise power
    residual / 73."""
    window = check_window(window)
    if not 1 <= q_hat <= window.shape[0]:
        raise ValueError(f"q_hat must be in [1, {window.shape[0]}], got {q_hat}")
    sigma_k2 = np.sum(np.abs(window) ** 2, axis=1) / SCH_BINS
    sigma_k2[q_hat - 1] = np.nan
    return sigma_k2, float(residual) / SCH_BINS


def check_window(window: np.ndarray) -> np.ndarray:
    """Validate and return a (N_Q, 73) complex window stack."""
    window = np.asarray(window, dtype=complex)
    if window.ndim != 2 or window.shape[1] != SCH_BINS:
        raise ValueError(f"window must be (N_Q, {SCH_BINS}), got {window.shape}")
    if window.shape[0] < 1:
        raise ValueError("window must contain at least one symbol")
    return window


def metric_table(window: np.ndarray, config: DetectorConfig) -> np.ndarray:
    """Score every hypothesis; returns shape (N_Q, 3, len(ifo_set))."""
    window = check_window(window)
    power = np.sum(np.abs(window) ** 2, axis=1)
    if np.any(power == 0.0):
        raise ValueError("window contains an all-zero symbol row")
    pss_conj = _pss_conj_stack()
    shifts = np.asarray(config.ifo_set, dtype=np.int64)
    if config.kind == "dd":
        return _core.scan_dd(window, pss_conj, shifts)
    if config.kind == "cfdc":
        return _core.scan_pcrr(window, pss_conj, shifts, np.array([0, PSS_LEN], dtype=np.int64))
    if config.kind == "pcrr":
        bounds = np.concatenate([[0], np.cumsum(config.basis.partition)]).astype(np.int64)
        return _core.scan_pcrr(window, pss_conj, shifts, bounds)
    return _core.scan_projected(window, pss_conj, shifts, config.basis.combiner)


def argmax_hypothesis(table: np.ndarray, ifo_set) -> tuple[Hypothesis, float]:
    """First maximizer of a metric table in (q, root, nu) scan order,
    which makes ties resolve to the smallest q, then the root order
    25 < 29 < 34, then the smallest nu."""
    flat = int(np.argmax(table))
    qi, ri, ji = np.unravel_index(flat, table.shape)
    est = Hypothesis(q=int(qi) + 1, root=ZC_ROOTS[ri], nu=int(ifo_set[ji]))
    return est, float(table[qi, ri, ji])


def detect(window: np.ndarray, config: DetectorConfig,
           return_table: bool = False) -> DetectionResult:
    """Joint estimate of (q, u, nu): the metric-table argmax over all
    N_Q * 3 * N_nu hypotheses."""
    table = metric_table(window, config)
    estimate, value = argmax_hypothesis(table, config.ifo_set)
    return DetectionResult(estimate=estimate, metric_value=value,
                           metric_table=table if return_table else None)


def write_window_csv(window: np.ndarray, fh) -> None:
    """Window file format: header then one ``k,n,re,im`` row per bin,
    17 significant digits, k = 1..N_Q, n = -36..36."""
    window = check_window(window)
    fh.write("k,n,re,im\n")
    for k in range(window.shape[0]):
        for j in range(SCH_BINS):
            v = window[k, j]
            fh.write(f"{k + 1},{j - SCH_HALF},{v.real:.17g},{v.imag:.17g}\n")


def read_window_csv(fh) -> np.ndarray:
    """Inverse of ``write_window_csv``; rows may appear in any order but
    every (k, n) bin must be present exactly once."""
    entries = {}
    header = fh.readline()
    if header.strip() != "k,n,re,im":
        raise ValueError(f"bad window file header: {header!r}")
    for raw in fh:
        line = raw.strip()
        if not line:
            continue
        k_s, n_s, re_s, im_s = line.split(",")
        entries[(int(k_s), int(n_s))] = float(re_s) + 1j * float(im_s)
    if not entries:
        raise ValueError("empty window file")
    n_q = max(k for k, _ in entries)
    window = np.zeros((n_q, SCH_BINS), dtype=complex)
    if len(entries) != n_q * SCH_BINS:
        raise ValueError(f"window file must hold {n_q * SCH_BINS} bins, got {len(entries)}")
    for (k, n), value in entries.items():
        if not (1 <= k <= n_q and -SCH_HALF <= n <= SCH_HALF):
            raise ValueError(f"bin index ({k}, {n}) out of range")
        window[k - 1, n + SCH_HALF] = value
    return window
