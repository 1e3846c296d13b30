"""Adapter producing the parsed-utterance JSONL corpus format."""

__version__ = "0.1.0"
