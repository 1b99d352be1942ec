"""Concentration inequalities for finite Markov chains.

Spectral quantities (gaps, pseudo spectral gap, asymptotic variance), mixing
profiles, Bernstein and McDiarmid type tail bounds, Marton mixing matrices, a
likelihood ratio test between two chains and seeded Monte Carlo checks.
"""

from .bounds import (
    BernsteinSpec,
    bernstein_spec,
    bernstein_tail,
    dtv_concentration_tail,
    empirical_tv_mean_bound,
    mcdiarmid_markov_tail,
    nonstationary_adjust,
    nq_decay,
    truncated_tail_bound,
    variance_report,
)
from .errors import MarkovConcError, NumericalError, ValidationError
from .hypothesis import build_test, coin_test, coin_tosses, decide, error_bounds, statistic
from .kernel import (
    Distribution,
    MarkovKernel,
    chi_square_nq,
    is_reversible,
    new_distribution,
    new_kernel,
    pair_chain,
    stationary_distribution,
    time_reversal,
)
from .marton import block_partition, markov_mixing_matrix, mcdiarmid_general_tail, mdep_mixing_matrix, operator_norm
from .mixing import gap_lower_bounds_from_mixing, mixing_profile, mixing_upper_bounds_from_gap, tv_decay_bound
from .results import BoundResult
from .simulate import SimConfig, sample_path, sample_paths, tail_experiment, tv_experiment
from .spectral import (
    absolute_spectral_gap,
    asymptotic_variance,
    exact_sum_variance,
    pseudo_spectral_gap,
    spectral_gap,
    spectral_report,
)

__version__ = "0.1.0"
