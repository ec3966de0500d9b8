"""
Computational engines of the P-entropy laboratory.

Interval exchange arithmetic, rank-one towers, Bernoulli coordinate
counting, partition refinement, entropy, schedules, correlations,
admissible fits, rigidity scans and Monte Carlo oracles.
"""

from .admissible_fitter import fit_admissible, kappa_scan
from .correlation_engine import (
    asymmetry_fingerprint,
    correlation,
    theta_distance,
    triple_correlation,
)
from .entropy_calculator import h_j, mc_entropy_estimate, p_entropy_profile, shannon_entropy
from .iet_engine import BreakpointDegeneracyWarning, compose, invert, power
from .mc_oracle import agreement_test, mc_correlation, mc_join_histogram
from .refiner import join_over_progression, pullback, set_intersection
from .rigidity_scanner import rigidity_scan
from .schedule_finder import schedule_finder

__all__ = [
    "BreakpointDegeneracyWarning",
    "compose",
    "invert",
    "power",
    "pullback",
    "join_over_progression",
    "set_intersection",
    "shannon_entropy",
    "h_j",
    "p_entropy_profile",
    "mc_entropy_estimate",
    "schedule_finder",
    "correlation",
    "triple_correlation",
    "asymmetry_fingerprint",
    "fit_admissible",
    "kappa_scan",
    "theta_distance",
    "rigidity_scan",
    "mc_join_histogram",
    "mc_correlation",
    "agreement_test",
]
