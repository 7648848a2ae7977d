"""Adversarial misspelling generation and context-sensitive spelling correction."""

__version__ = '0.1.0'
