"""Temporal robustness of STL specifications over discrete-time signals."""
