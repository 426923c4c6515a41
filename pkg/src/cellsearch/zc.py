"""Primary synchronization sequences (frequency-domain Zadoff-Chu family).

The three LTE primary sequences are length-63 polyphase exponentials on
subcarriers n = -31..31 with a null at DC; the root index encodes the
sector id.  Sequences are stored densely with a fixed offset convention:
**array slot i holds subcarrier index n = i - 31**.  Every module that
operates on the 63-bin support reuses this convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: Root index per sector id 0, 1, 2.
ZC_ROOTS = (25, 29, 34)

#: Sequence support: n = -31..31, 63 slots, DC at slot 31.
PSS_LEN = 63
PSS_HALF = 31

#: Synchronization subband at the DFT output: n = -36..36, 73 bins.
SCH_BINS = 73
SCH_HALF = 36

_SECTOR_FOR_ROOT = {root: sector for sector, root in enumerate(ZC_ROOTS)}


@dataclass(frozen=True)
class PssSequence:
    """One frequency-domain primary sequence.

    Attributes
    ----------
    root : int
        Zadoff-Chu root index, one of ``ZC_ROOTS``.
    samples : np.ndarray
        63 complex values; slot i holds subcarrier n = i - 31.  Unit
        modulus everywhere except the DC slot, which is exactly zero.
    """

    root: int
    samples: np.ndarray = field(repr=False)

    def at(self, n: int) -> complex:
        """Sample at subcarrier index ``n`` in [-31, 31]."""
        if not -PSS_HALF <= n <= PSS_HALF:
            raise ValueError(f"subcarrier index {n} outside [-31, 31]")
        return complex(self.samples[n + PSS_HALF])


def _check_root(root: int) -> int:
    if root not in _SECTOR_FOR_ROOT:
        raise ValueError(f"root must be one of {ZC_ROOTS}, got {root!r}")
    return int(root)


def generate_pss(root: int) -> PssSequence:
    """Generate the primary sequence for a Zadoff-Chu root index.

    The phase argument ``root * (n^2 + 63 n + 110) / 63`` is reduced
    modulo 2 in integer arithmetic before exponentiation, so the central
    symmetry a(n) = a(-n) holds to the last bit.
    """
    _check_root(root)
    n = np.arange(-PSS_HALF, PSS_HALF + 1, dtype=np.int64)
    k = (root * (n * n + 63 * n + 110)) % 126
    samples = np.exp(-1j * np.pi * k / 63.0)
    samples[PSS_HALF] = 0.0  # DC is never modulated
    samples.flags.writeable = False
    return PssSequence(root=int(root), samples=samples)


def root_for_sector(sector: int) -> int:
    """Zadoff-Chu root index for a sector id in {0, 1, 2}."""
    if sector not in (0, 1, 2):
        raise ValueError(f"sector id must be 0, 1 or 2, got {sector!r}")
    return ZC_ROOTS[sector]


def sector_for_root(root: int) -> int:
    """Sector id for a Zadoff-Chu root index (inverse of root_for_sector)."""
    return _SECTOR_FOR_ROOT[_check_root(root)]


def cell_id(group: int, sector: int) -> int:
    """Physical cell id ``3 * group + sector`` for group 0..167."""
    if not 0 <= group <= 167:
        raise ValueError(f"cell id group must be in [0, 167], got {group!r}")
    if sector not in (0, 1, 2):
        raise ValueError(f"sector id must be 0, 1 or 2, got {sector!r}")
    return 3 * group + sector


def cross_correlation(a: PssSequence, b: PssSequence) -> float:
    """Magnitude of the inner product ``sum_n a(n) conj(b(n))``.

    Diagnostic for the sequences' correlation properties; 62 for a
    matched pair, small for distinct roots.
    """
    return float(abs(np.vdot(b.samples, a.samples)))
