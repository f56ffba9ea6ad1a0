"""Vlasov-Poisson dynamics in density, momentum one-form and canonical variables."""

__version__ = "0.1.0"
