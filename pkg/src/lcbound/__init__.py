"""Exact certificates, bound evaluation and numerical probes for a one-sided
concentration inequality over log-concave laws with mean 0 and variance 1."""

__version__ = "0.1.0"
