"""Desk-scale financial transaction graph benchmark kit."""

__version__ = "0.1.0"
