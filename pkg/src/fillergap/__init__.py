"""Toolkit for detecting and analyzing filler-gap constructions in parsed corpora."""

__version__ = "0.1.0"

from .labels import Label

__all__ = ["Label", "__version__"]
