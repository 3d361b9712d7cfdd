"""Numerical braid monodromy on explicit polar models."""

from .kernel import available_backends, backend_name
from .model import PolarModel, ModelError, builtin_model, normal_crossings, quadric, symmetric_matrices
from .tracker import (
    CriticalSet,
    LoopSpec,
    Segment,
    TrackingError,
    braid_generator_loop,
    carousel_report,
    critical_points,
    full_turn_loop,
    identity_loop,
    track_loop,
)

__all__ = [
    "available_backends",
    "backend_name",
    "PolarModel",
    "ModelError",
    "builtin_model",
    "quadric",
    "normal_crossings",
    "symmetric_matrices",
    "CriticalSet",
    "LoopSpec",
    "Segment",
    "TrackingError",
    "braid_generator_loop",
    "carousel_report",
    "critical_points",
    "full_turn_loop",
    "identity_loop",
    "track_loop",
]
