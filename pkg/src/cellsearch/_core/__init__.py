"""Hot hypothesis-scan kernels, compiled when possible.

``BACKEND`` names the implementation selected at import time: "cython"
when the compiled extension is available, "numpy" otherwise.  Both
variants expose the same three functions with identical numerics (up to
floating-point summation order); ``benchmarks/bench_scan.py`` compares
their throughput.
"""

try:
    from . import _scan_cy as _impl
    BACKEND = "cython"
except ImportError:  # extension not built: pure-python fallback
    from . import _scan_np as _impl
    BACKEND = "numpy"

scan_projected = _impl.scan_projected
scan_pcrr = _impl.scan_pcrr
scan_dd = _impl.scan_dd

__all__ = ["BACKEND", "scan_projected", "scan_pcrr", "scan_dd"]
