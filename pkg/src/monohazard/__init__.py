"""Tests for monotonicity of a hazard rate based on convex minorants of the
empirical cumulative hazard, with Monte Carlo calibration of the limiting
canonical process."""

from ._version import __version__

from .convex_minorant import ConvexPL, StepFunction, gcm_of_step, gcm_points, gcm_sampled_path
from .empirical import CumulativeHazardGCM, SortedSample, ecdf, emp_cum_hazard, isotonic_estimators
from .models import AsymptoticConstants, HazardModel, asymptotic_constants, make_model, sample_from
from .canonical import CanonicalConstants, estimate_constants, load_constants
from .statistics import MonotoneHazardTest, TestReport, standardize, statistic_T, statistic_U

__all__ = [
    "AsymptoticConstants",
    "CanonicalConstants",
    "ConvexPL",
    "CumulativeHazardGCM",
    "HazardModel",
    "MonotoneHazardTest",
    "SortedSample",
    "StepFunction",
    "TestReport",
    "asymptotic_constants",
    "ecdf",
    "emp_cum_hazard",
    "estimate_constants",
    "gcm_of_step",
    "gcm_points",
    "gcm_sampled_path",
    "isotonic_estimators",
    "load_constants",
    "make_model",
    "sample_from",
    "standardize",
    "statistic_T",
    "statistic_U",
]
