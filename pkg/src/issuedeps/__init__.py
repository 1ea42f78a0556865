"""Issue-dependency analysis engine.

Turns flat issue-tracker exports into a typed issue graph and provides
reference detection, duplicate detection, contextualized proposal ranking,
and release-consistency checking with preferred diagnosis, behind a batch
CLI and an HTTP query service.
"""
from .consistency import (
    DiagnosisResult,
    RuleViolation,
    check_and_diagnose,
    check_consistency,
    check_dependency,
    diagnose,
    fastdiag,
    merge_duplicates,
)
from .dupdetect import (
    Cluster,
    DuplicateProposal,
    TfidfModel,
    build_model_for,
    candidate_pairs,
    cosine_sim,
    detect_duplicates,
    text_preprocess,
)
from .engine import Engine
from .graph import (
    IssueGraph,
    TopologyReport,
    build_graph,
    component_of,
    components,
    distance,
    graph_stats,
    p_depth_subgraph,
)
from .model import (
    DecisionRecord,
    DecisionVerdict,
    Dependency,
    DependencyStatus,
    DependencyType,
    Issue,
    IssueType,
    UnknownIssueError,
    ValidationError,
    Version,
)
from .proposals import ContextParams, PropertyRule, RankedProposal, combine, contextualize
from .refdetect import ReferenceProposal, detect_references
from .store import Repository, Store

__version__ = "0.1.0"

__all__ = [
    "Cluster",
    "ContextParams",
    "DecisionRecord",
    "DecisionVerdict",
    "Dependency",
    "DependencyStatus",
    "DependencyType",
    "DiagnosisResult",
    "DuplicateProposal",
    "Engine",
    "Issue",
    "IssueGraph",
    "IssueType",
    "PropertyRule",
    "RankedProposal",
    "ReferenceProposal",
    "Repository",
    "RuleViolation",
    "Store",
    "TfidfModel",
    "TopologyReport",
    "UnknownIssueError",
    "ValidationError",
    "Version",
    "build_graph",
    "build_model_for",
    "candidate_pairs",
    "check_and_diagnose",
    "check_consistency",
    "check_dependency",
    "combine",
    "component_of",
    "components",
    "contextualize",
    "cosine_sim",
    "detect_duplicates",
    "detect_references",
    "diagnose",
    "distance",
    "fastdiag",
    "graph_stats",
    "merge_duplicates",
    "p_depth_subgraph",
    "text_preprocess",
]
