"""Synchronization control of higher-order Kuramoto oscillators on hypergraphs."""

__version__ = "1.0.0"
