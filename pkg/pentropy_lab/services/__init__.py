"""
Service layer for the P-entropy laboratory.

Configuration loading, descriptor building and report emission.
"""

from .config_manager import ConfigurationManager
from .descriptor_loader import DescriptorLoader, Experiment, load_experiment
from .report_writer import ReportWriter

__all__ = [
    "ConfigurationManager",
    "DescriptorLoader",
    "Experiment",
    "load_experiment",
    "ReportWriter",
]
