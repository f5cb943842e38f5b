"""Exact and numerical tools for the free step-3 Carnot group on two generators."""

from .algebra import (
    IDENTITY,
    AlgebraElement,
    GroupPoint,
    bch3,
    exp_horizontal,
    exp_to_group,
    group_to_exp,
    inv,
    mul,
)
from .ccmetric import CCResult, DistanceBudget, cc_lower, cc_upper
from .curves import Direction, PolygonalCurve, Segment, SegmentCurve, lift
from .limitcurve import CurveAddress, eval_gamma, level_params
from .modification import ModificationSpec, Variant, build

__all__ = [
    "IDENTITY", "AlgebraElement", "GroupPoint", "bch3", "exp_horizontal", "exp_to_group",
    "group_to_exp", "inv", "mul", "CCResult", "DistanceBudget", "cc_lower", "cc_upper",
    "Direction", "PolygonalCurve", "Segment", "SegmentCurve", "lift", "CurveAddress",
    "eval_gamma", "level_params", "ModificationSpec", "Variant", "build",
]
