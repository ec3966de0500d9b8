"""
Tests for the P-entropy laboratory.
"""
