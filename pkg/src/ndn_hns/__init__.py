"""Hybrid IoT content naming for Named Data Networking."""

from .codec import parse, parse_prefix, serialize, serialize_prefix
from .name import (
    AttributePair,
    AttributesComponent,
    Digest,
    Encoding,
    FlatComponent,
    FreshnessKind,
    FreshnessSpec,
    HierarchicalComponent,
    Name,
    NamePrefix,
    RootPrefix,
    TaskSpec,
    TaskType,
    build_name,
    hierarchical_prefix,
    is_prefix_of,
)
from .registry import AppCategory, Registry, default_registry, lookup, register

__version__ = "0.1.0"

__all__ = [
    "AppCategory",
    "AttributePair",
    "AttributesComponent",
    "Digest",
    "Encoding",
    "FlatComponent",
    "FreshnessKind",
    "FreshnessSpec",
    "HierarchicalComponent",
    "Name",
    "NamePrefix",
    "Registry",
    "RootPrefix",
    "TaskSpec",
    "TaskType",
    "build_name",
    "default_registry",
    "hierarchical_prefix",
    "is_prefix_of",
    "lookup",
    "parse",
    "parse_prefix",
    "register",
    "serialize",
    "serialize_prefix",
]
