"""Reduced-rank expansion bases for the equivalent channel frequency response.

Four 63 x P bases are provided: the covariance-matched eigenbasis
("mmse"), its covariance-free approximation ("ammse", eigenvectors of
F F^H), polynomials ("prr") and piecewise constants ("pcrr", whose P = 1
case is the plain frequency-domain correlator).  Each basis carries a
precomputed P x 63 combiner W = C^H B^H with C C^H = (B^H B)^-1, so the
detector metric ||W z||^2 equals the projector form z^H B (B^H B)^-1 B^H z
while costing a single small matrix-vector product per hypothesis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .channel import DFT_SIZE, fourier_matrix
from .zc import PSS_HALF, PSS_LEN

#: Recognized basis kinds.
KINDS = ("mmse", "ammse", "prr", "pcrr")

#: Polynomial order cap: keeps cond(B^H B) below ~1e10 for the scaled monomials.
PRR_MAX_RANK = 8

#: Receiver design length of the approximated eigenbasis (samples).
AMMSE_DESIGN_LEN = 120

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class ExpansionBasis:
    """A 63 x P expansion basis with its cached fast combiner.

    ``combiner`` is W = C^H B^H (P x 63) with C the Cholesky factor of
    (B^H B)^-1; ``partition`` records the subband sizes for the
    piecewise-constant kind.
    """

    kind: str
    matrix: np.ndarray = field(repr=False)
    combiner: np.ndarray = field(repr=False)
    partition: tuple | None = None

    @property
    def rank(self) -> int:
        return self.matrix.shape[1]


def make_basis(matrix: np.ndarray, kind: str, partition: tuple | None = None) -> ExpansionBasis:
    """Wrap a full-column-rank 63 x P matrix, precomputing the combiner."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != PSS_LEN or not 1 <= matrix.shape[1] <= PSS_LEN:
        raise ValueError(f"basis must be 63 x P with 1 <= P <= 63, got {matrix.shape}")
    gram = matrix.conj().T @ matrix
    gram = (gram + gram.conj().T) / 2.0
    if np.linalg.cond(gram) > _COND_LIMIT:
        raise np.linalg.LinAlgError("basis columns are numerically dependent")
    chol = np.linalg.cholesky(gram)
    combiner = np.linalg.solve(chol, matrix.conj().T)  # C^H B^H with C C^H = gram^-1
    matrix = matrix.copy()
    matrix.flags.writeable = False
    combiner.flags.writeable = False
    return ExpansionBasis(kind=kind, matrix=matrix, combiner=combiner,
                          partition=partition)


def hermitian_eig(a: np.ndarray):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    The input is symmetrized before factorization; eigenvectors come
    back orthonormal with an arbitrary global phase.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got {a.shape}")
    w, v = np.linalg.eigh((a + a.conj().T) / 2.0)
    return w[::-1].copy(), v[:, ::-1].copy()


def _check_rank(p: int, upper: int = PSS_LEN - 1) -> int:
    if not 1 <= p <= upper:
        raise ValueError(f"rank P must be in [1, {upper}], got {p}")
    return int(p)


def mmse_basis(c_eq: np.ndarray, fmat: np.ndarray, p: int) -> ExpansionBasis:
    """Optimal rank-P basis for a known equivalent-CIR covariance.

    Columns are the P dominant eigenvectors of F C_eq F^H; they come out
    orthonormal, so the combiner reduces to B^H.
    """
    _check_rank(p)
    r = fmat @ np.asarray(c_eq, dtype=complex) @ fmat.conj().T
    _, v = hermitian_eig(r)
    return make_basis(v[:, :p], kind="mmse")


@lru_cache(maxsize=64)
def ammse_basis(p: int, design_len: int = AMMSE_DESIGN_LEN,
                dft_size: int = DFT_SIZE) -> ExpansionBasis:
    """Covariance-free variant: P dominant eigenvectors of F F^H.

    ``design_len`` is the receiver-side assumption on the equivalent CIR
    length (120 samples by default), decoupled from the true channel.
    """
    _check_rank(p)
    fmat = fourier_matrix(design_len, dft_size)
    _, v = hermitian_eig(fmat @ fmat.conj().T)
    return make_basis(v[:, :p], kind="ammse")


@lru_cache(maxsize=16)
def prr_basis(p: int) -> ExpansionBasis:
    """Polynomial basis of degree P - 1 on n = -31..31.

    Stored as scaled monomials (n / 31)^(p-1): the span (hence the
    projector and the metric) is unchanged, the Gram conditioning is
    vastly better.  P is capped at 8.
    """
    _check_rank(p, upper=PRR_MAX_RANK)
    n = np.arange(-PSS_HALF, PSS_HALF + 1, dtype=float) / PSS_HALF
    cols = np.column_stack([n**k for k in range(p)])
    return make_basis(cols, kind="prr")


def pcrr_partition(p: int) -> tuple:
    """Subband sizes for P adjacent blocks covering the 63 subcarriers:
    with 63 = M P + R, the first R blocks get M + 1 subcarriers and the
    rest get M."""
    _check_rank(p, upper=PSS_LEN)
    m, r = divmod(PSS_LEN, p)
    return tuple([m + 1] * r + [m] * (p - r))


@lru_cache(maxsize=70)
def pcrr_basis(p: int) -> ExpansionBasis:
    """Piecewise-constant basis: indicator columns over the P subbands.

    P = 1 spans only the constant sequence (the conventional correlator);
    P = 63 is the identity, useful to exhibit the full-rank degeneracy.
    """
    partition = pcrr_partition(p)
    cols = np.zeros((PSS_LEN, p))
    start = 0
    for i, size in enumerate(partition):
        cols[start:start + size, i] = 1.0
        start += size
    return make_basis(cols, kind="pcrr", partition=partition)


def projector_of(basis: ExpansionBasis) -> np.ndarray:
    """Orthogonal projector G = B (B^H B)^-1 B^H onto the basis span."""
    g = basis.combiner.conj().T @ basis.combiner
    return (g + g.conj().T) / 2.0


def mse_of_basis(basis: ExpansionBasis, c_eq: np.ndarray, fmat: np.ndarray) -> float:
    """Mean-square representation error tr{(I - G) F C_eq F^H}.

    Zero for a full-rank basis; minimized over all rank-P bases by
    ``mmse_basis`` built from the same covariance.
    """
    c_eq = np.asarray(c_eq, dtype=complex)
    if fmat.shape[0] != PSS_LEN or c_eq.shape != (fmat.shape[1], fmat.shape[1]):
        raise ValueError(f"dimension mismatch: F {fmat.shape}, C_eq {c_eq.shape}")
    r = fmat @ c_eq @ fmat.conj().T
    g = projector_of(basis)
    return float(np.real(np.trace(r) - np.trace(g @ r)))
