"""Bayesian networks, multinets and similarity networks over discrete variables."""

from .core import (
    Cpt,
    DiscreteNetwork,
    JointTable,
    ValidationReport,
    Variable,
    Violation,
    d_separated,
    enumerate_joint,
    free_parameter_count,
    joint_probability,
    network_from_tables,
    topological_order,
    validate_network,
)
from .errors import (
    AcyclicityError,
    AsymnetError,
    ContractError,
    InconsistentEvidenceError,
    InconsistentSimnetError,
    ModelError,
    ModelValidationError,
    ParseError,
    ResourceError,
    SchemaError,
    StructureError,
    UndefinedConditionalError,
    UndefinedLikelihoodError,
    ZeroContextWarning,
    ZeroPriorError,
)
from .inference import (
    EliminationOrder,
    Factor,
    Posterior,
    marginal,
    posterior_chain,
    repeated_reversal_to_root,
    reverse_arc,
)
from .multinet import (
    HypothesisSpace,
    Multinet,
    hypothesis_prior,
    hypothesis_priors,
    likelihood,
    multinet_joint,
    multinet_param_count,
    posterior,
    split_network,
    staged_posterior,
    union_network,
    validate_multinet,
)
from .serialize import ModelDocument, parse_model, serialize_model
from .simnet import (
    IRRELEVANT,
    Cover,
    OrdinaryLocalNetwork,
    SimilarityNetwork,
    conditional_factor,
    convert_to_multinet,
    is_connected_cover,
    recover_priors,
    reconstruct_joint,
    redundancy_report,
    relevance_prune,
    simnet_from_network,
    validate_simnet,
)

__version__ = "0.1.0"
