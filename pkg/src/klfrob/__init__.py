"""Kloosterman sums, p-adic Frobenius structures and Dwork congruences."""

__version__ = "0.1.0"
