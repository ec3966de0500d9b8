"""
P-entropy laboratory

Exact and Monte Carlo computation of sequence entropies along arithmetic
progressions, weak-limit diagnostics of correlation sequences, and rigidity
scans for interval exchanges, Bernoulli shifts and rank-one towers.
"""

__version__ = "0.1.0"
__author__ = "P-Entropy Lab Team"
