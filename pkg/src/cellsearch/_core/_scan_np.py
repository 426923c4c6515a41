"""Pure-numpy scan kernels (fallback when the compiled extension is absent).

Each function scores every (symbol, root, frequency-shift) hypothesis of
a 73-bin window stack and returns a float64 table of shape
(num_symbols, num_roots, num_shifts).  Rows are never all-zero by
contract (the detector validates before dispatching).
"""

import numpy as np


def _prepare(window, pss_conj, shifts):
    window = np.ascontiguousarray(window, dtype=complex)
    pss_conj = np.ascontiguousarray(pss_conj, dtype=complex)
    shifts = np.ascontiguousarray(shifts, dtype=np.int64)
    power = np.einsum("ij,ij->i", window.real, window.real)
    power += np.einsum("ij,ij->i", window.imag, window.imag)
    return window, pss_conj, shifts, power


def scan_projected(window, pss_conj, shifts, combiner):
    """Metric ||W z||^2 / ||x||^2 for every hypothesis, with the despread
    z(m) = x(m + shift) conj(a(m)) and W the basis combiner (P x 63)."""
    window, pss_conj, shifts, power = _prepare(window, pss_conj, shifts)
    combiner = np.ascontiguousarray(combiner, dtype=complex)
    out = np.empty((window.shape[0], pss_conj.shape[0], shifts.shape[0]))
    wt = combiner.T
    for j, nu in enumerate(shifts):
        segment = window[:, nu + 5:nu + 68]
        for r in range(pss_conj.shape[0]):
            proj = (segment * pss_conj[r]) @ wt
            out[:, r, j] = np.einsum("ip,ip->i", proj.real, proj.real)
            out[:, r, j] += np.einsum("ip,ip->i", proj.imag, proj.imag)
    out /= power[:, None, None]
    return out


def scan_pcrr(window, pss_conj, shifts, bounds):
    """Piecewise-correlation metric: per-subband coherent sums |sum z|^2
    weighted by 1 / K_p; a single [0, 63] subband gives the plain
    frequency-domain correlator."""
    window, pss_conj, shifts, power = _prepare(window, pss_conj, shifts)
    bounds = np.ascontiguousarray(bounds, dtype=np.int64)
    sizes = np.diff(bounds).astype(float)
    out = np.empty((window.shape[0], pss_conj.shape[0], shifts.shape[0]))
    for j, nu in enumerate(shifts):
        segment = window[:, nu + 5:nu + 68]
        for r in range(pss_conj.shape[0]):
            z = segment * pss_conj[r]
            block = np.add.reduceat(z, bounds[:-1], axis=1)
            out[:, r, j] = ((block.real**2 + block.imag**2) / sizes).sum(axis=1)
    out /= power[:, None, None]
    return out


def scan_dd(window, pss_conj, shifts):
    """Differential metric Re{sum_n z(n) conj(z(n-1))} / ||x||^2."""
    window, pss_conj, shifts, power = _prepare(window, pss_conj, shifts)
    out = np.empty((window.shape[0], pss_conj.shape[0], shifts.shape[0]))
    for j, nu in enumerate(shifts):
        segment = window[:, nu + 5:nu + 68]
        for r in range(pss_conj.shape[0]):
            z = segment * pss_conj[r]
            prod = z[:, 1:] * z[:, :-1].conj()
            out[:, r, j] = prod.real.sum(axis=1)
    out /= power[:, None, None]
    return out
