"""Braid positivity toolkit: band-generator words, Garside normal forms,
HOMFLYPT invariants, Seifert-surface braiding and positivity certificates."""

__version__ = "0.1.0"
