"""Subordinated Gaussian random fields: sampling, laws, covariance and moments."""

__version__ = "0.1.0"
