"""Rule-based stochastic simulation with dynamic influence network analytics.

Parse a model file, simulate it with the direct stochastic simulation
algorithm, aggregate per-event rule-on-rule influence into time windows, then
cluster, filter, export and serve the resulting dynamic influence network.
"""

__version__ = "0.1.0"

from .analysis import ClusterConfig, Clustering, RuleSeries, cluster, filter_links, rule_series
from .export import (
    ExportFormatError,
    build_document,
    dumps_document,
    load_document,
    windows_from_document,
    write_document,
)
from .influence import (
    DinWindow,
    EventDelta,
    WindowAccumulator,
    event_delta_activity,
    event_delta_probability,
    windows_from_trace,
)
from .matching import (
    CLASH,
    ActivityVector,
    Clash,
    MatchTracker,
    activities,
    activity,
    count_embeddings,
    count_pattern,
    rule_symmetry,
    sample_embedding,
)
from .mixture import CompiledModel, Embedding, Mixture, RewriteEffect, apply_rule, init_mixture
from .model import (
    AgentPattern,
    AgentSignature,
    InitDecl,
    Model,
    Observable,
    ObsTerm,
    Pattern,
    Rule,
    SitePattern,
    SiteSignature,
)
from .parser import ParseError, format_model, parse_model
from .simulate import (
    ConfigError,
    DeadlockReached,
    EventRecord,
    ObservableSeries,
    SimConfig,
    SimResult,
    Simulation,
    eval_observable,
    run,
)

__all__ = [
    "__version__",
    "AgentPattern", "AgentSignature", "InitDecl", "Model", "Observable", "ObsTerm",
    "Pattern", "Rule", "SitePattern", "SiteSignature",
    "ParseError", "parse_model", "format_model",
    "CompiledModel", "Mixture", "Embedding", "RewriteEffect", "init_mixture", "apply_rule",
    "ActivityVector", "Clash", "CLASH", "MatchTracker",
    "activities", "activity", "count_embeddings", "count_pattern",
    "rule_symmetry", "sample_embedding",
    "ConfigError", "DeadlockReached", "EventRecord", "ObservableSeries",
    "SimConfig", "SimResult", "Simulation", "eval_observable", "run",
    "DinWindow", "EventDelta", "WindowAccumulator",
    "event_delta_activity", "event_delta_probability", "windows_from_trace",
    "ClusterConfig", "Clustering", "RuleSeries", "cluster", "filter_links", "rule_series",
    "ExportFormatError", "build_document", "dumps_document", "load_document",
    "windows_from_document", "write_document",
]
