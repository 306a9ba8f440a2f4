"""Shallow discourse parsing: connectives, arguments and senses."""

__version__ = "0.1.0"
