"""LTE stage-2 cell search: joint PSS detection, sector identification
and integer frequency-offset recovery over the 73-bin synchronization
subband, with reduced-rank channel representations and a frequency-domain
Monte Carlo harness."""

from ._core import BACKEND
from .channel import (PulseShape, TapProfile, build_cir_covariance, builtin_profile,
                      cfr, cir_length, fourier_matrix, load_profile,
                      pulse_power_profile, realize_channel, shift_to_equivalent,
                      uniform_theta_prior)
from .detector import (DetectionResult, DetectorConfig, Hypothesis, despread,
                       detect, estimate_expansion_coeffs, estimate_noise_vars,
                       metric_cfdc, metric_dd, metric_pcrr, metric_reduced_rank)
from .harness import (DetectorSpec, ErrorRates, SweepConfig, build_detector,
                      flops_estimate, run_sweep, run_trial, wilson_interval)
from .rankbasis import (ExpansionBasis, ammse_basis, hermitian_eig, make_basis,
                        mmse_basis, mse_of_basis, pcrr_basis, pcrr_partition,
                        projector_of, prr_basis)
from .simulator import SimScenario, apply_snr, simulate_window
from .zc import (ZC_ROOTS, PssSequence, cell_id, cross_correlation, generate_pss,
                 root_for_sector, sector_for_root)

__version__ = "0.1.0"
