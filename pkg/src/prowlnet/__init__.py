"""Centralization of decentralized opinion networks via prowling access-unit selection."""

from prowlnet.graph import (
    Coverage,
    Graph,
    GraphEvent,
    InvalidEvent,
    NetworkInstance,
    UnknownNode,
    apply_event,
    degree,
    is_dominating,
    within_distance,
)

__version__ = "0.1.0"

__all__ = [
    "Coverage",
    "Graph",
    "GraphEvent",
    "InvalidEvent",
    "NetworkInstance",
    "UnknownNode",
    "apply_event",
    "degree",
    "is_dominating",
    "within_distance",
]
