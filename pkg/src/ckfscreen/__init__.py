"""Model-free marginal feature screening with the cumulative Kolmogorov filter."""
from .core_stats import SortedSample, ks_sweep, sort_sample, two_sample_ks
from .copula_oracle import CopulaParams, lemma_kj, lemma_kj_drho, population_K, ystar
from .errors import ScreeningError
from .filters import (
    Dataset,
    FeatureScores,
    KnotScheme,
    Method,
    SelectedSet,
    ckf_stat,
    dcor_stat,
    fkf_fused_stat,
    fkf_slice_stat,
    kf_binary_stat,
    screen_all,
    select_top,
    sis_stat,
)
from .simgen import CovarianceSpec, GeneratedInstance, ModelSpec, generate, sample_mvn

__version__ = "0.1.0"
