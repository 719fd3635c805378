"""Trilinear channel estimation for surface-assisted multi-user uplinks.

Core pieces: three-way tensor machinery (:mod:`risce.tensor3`), channel and
training synthesis (:mod:`risce.channel`), alternating LS and message
passing estimators (:mod:`risce.als`, :mod:`risce.vamp`), estimation lower
bounds (:mod:`risce.crb`), downlink precoding and rates
(:mod:`risce.precoding`), and the seeded Monte Carlo harness with its CLI
(:mod:`risce.harness`, :mod:`risce.cli`).
"""

from .als import (
    EstimateResult,
    StoppingRule,
    als_estimate,
    als_step_hr,
    als_step_hs,
    genie_ls,
    init_estimates,
    nmse,
    normalize_first_column,
    remove_ambiguity,
)
from .channel import (
    ChannelPair,
    FeasibilityReport,
    RxTensor,
    SystemConfig,
    TrainingSet,
    feasibility_check,
    gen_channels,
    gen_training,
    partition_plan,
    pin_reference,
    synthesize_rx,
)
from .crb import CrbResult, FimBlocks, build_fim, crb_blocks, fix_scaling, noise_cross_cov
from .exceptions import (
    AmbiguityError,
    FeasibilityError,
    NumericalFailure,
    SingularityError,
)
from .harness import (
    ExperimentSpec,
    ResultRow,
    estimate_partitioned,
    run_experiment,
    validate_spec,
)
from .precoding import (
    PhaseVector,
    PrecoderSpec,
    RateReport,
    effective_channel,
    error_power_eps,
    optimize_phase,
    precoder,
    rates,
    rates_perfect,
)
from .tensor3 import compose_tensor, khatri_rao, kruskal_rank, refold, unfold
from .vamp import GaussianPrior, vamp_column, vamp_estimate

__version__ = "0.1.0"
