"""Computational models of the identity labeling problem.

ACT (deflection minimisation), parallel constraint satisfaction (PCS-FA)
and Latent Cognitive Social Spaces (LCSS), all expressed as scoring
functions inside one discrete choice model, with the estimation and
evaluation tools needed to compare them on vignette survey data.
"""

from .affect import (
    CoefficientModel,
    DeflectionWeights,
    EpaDictionary,
    EpaVector,
    EventFundamental,
    ModifierModel,
    TermModel,
    TransientImpression,
    act_phi,
    apply_modifier,
    deflection,
    expand_covariates,
    impression_change,
    load_coefficients,
    load_epa_dictionary,
    load_modifier_coefficients,
)
from .bayesact import PotentialConfig, bayesact_choice, bayesact_potential, log_potential
from .choice import (
    LabelDistribution,
    ScoredCandidates,
    argmax_label,
    binary_choice_prob,
    softmax_distribution,
)
from .errors import (
    DataFormatError,
    FitError,
    IdentityLabelingError,
    MalformedModelError,
    UnknownConceptError,
)
from .estimation import (
    DesignRow,
    FitResult,
    ResponseDataset,
    agresti_coull_interval,
    bootstrap_mae_ci,
    build_pcs_design,
    fit_lcss_weights,
    fit_logistic,
    load_responses,
    mean_absolute_error,
    simulate_responses,
)
from .experiment import PredictionReport, emit_report, run_comparison
from .lcss import (
    BlockCoefficientModel,
    ComponentDeflections,
    ExtendedFundamental,
    LcssWeights,
    lcss_deflection_decomposed,
    lcss_deflection_full,
    lcss_probability,
    scored_component_deflections,
)
from .pcs import (
    ActivationParams,
    ActivationState,
    BetaScores,
    SemanticNetwork,
    beta_from_activation,
    load_handcoded_betas,
    pcs_probability,
    spread_activation,
)
from .vignettes import ActContext, VignetteQuestion, load_name_epa, load_vignettes

__version__ = "0.1.0"
