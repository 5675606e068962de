"""Neural and classical selection among scalar-parameter candidate models."""

__version__ = "0.1.0"
