"""Learning hidden Markov models by non-negative factorisation of prefix-suffix statistics."""
from .estimator import NMFHMMLearner
from .evaluation import (
    DivergenceCurve,
    divergence_curve,
    prank_counterexample_check,
    prank_gt_rank_model_check,
)
from .extract import (
    extract_model,
    learn,
    marginalize_last_symbol,
    rebuild_C_against_F,
    rebuild_D_from_model,
    solve_transition_matrices,
)
from .model import (
    HmmModel,
    ObservationSequence,
    finite_dimensional_distribution,
    prefix_state_posterior,
    read_model,
    simulate,
    stationary_distribution,
    suffix_distribution,
    validate,
    write_model,
)
from .nmf import FactorPair, NmfConfig, factorize, i_divergence, random_init
from .spectral import SpectrumReport, estimate_order, numerical_rank, singular_spectrum, \
    spectrum_report
from .stats import PrefixSuffixStats, build_stats, weighted_frequencies

__version__ = "0.1.0"
