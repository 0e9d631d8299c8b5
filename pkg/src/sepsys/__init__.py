"""Trees of tangles for finite abstract separation systems."""

from .core import (
    CornerSystem,
    HypothesisViolation,
    Orientation,
    SubSystem,
    Universe,
    ValidationReport,
    classify,
    is_consistent,
    is_regular_system,
    is_tree_set,
    nested,
    points_towards,
    subsystem_k,
    validate_corner_system,
    validate_universe,
)
from .profiles import Distinction, Profile, ProfileSet, enumerate_profiles, induced, k_profiles

__version__ = "0.1.0"
