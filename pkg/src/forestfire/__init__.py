"""Exact simulation and Monte Carlo experiments for self-organized forest-fire models
started from the all-vacant state, near the critical time of pure growth."""

__version__ = "0.1.0"
