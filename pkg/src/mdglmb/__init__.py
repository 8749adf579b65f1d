"""Labeled RFS multi-target tracking: delta-GLMB, marginalized delta-GLMB and LMB filters."""

__version__ = "0.1.0"
