from .bundle import Bundle, BundleState, NodeState, Priority, drop_by_priority, enqueue
from .engine import Engine, StepMetrics
from .routing import Route, cgr_route

__all__ = [
    "Bundle", "BundleState", "Engine", "NodeState", "Priority", "Route", "StepMetrics",
    "cgr_route", "drop_by_priority", "enqueue",
]
