"""Tokenization, morphology and gap-filling tools for ancient and historical languages."""

__version__ = "0.1.0"
