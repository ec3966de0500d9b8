"""
Utility modules for the P-entropy laboratory.
"""
