"""kgforage: augment tabular datasets with columns derived from knowledge graphs."""

from .client import BackendConfig, KgClient, ResolutionResult
from .discovery import AttributeDescriptor, DiscoveryConfig, discover_related
from .graph_store import KnowledgeGraph, load_fixture, load_fixture_file
from .materialize import aggregate, example_subgraph, fold_tree, materialize, preview_join
from .plans import Hop, JoinPlan, allowed_aggregations, describe, validate
from .table import Dataset, export_csv, import_csv
from .values import Value

__all__ = [
    "AttributeDescriptor",
    "BackendConfig",
    "Dataset",
    "DiscoveryConfig",
    "Hop",
    "JoinPlan",
    "KgClient",
    "KnowledgeGraph",
    "ResolutionResult",
    "Value",
    "aggregate",
    "allowed_aggregations",
    "describe",
    "discover_related",
    "example_subgraph",
    "export_csv",
    "fold_tree",
    "import_csv",
    "load_fixture",
    "load_fixture_file",
    "materialize",
    "preview_join",
    "validate",
]

__version__ = "0.1.0"
