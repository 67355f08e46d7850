"""Shape- and complexity-based clustering of daily behavioral time series."""

__version__ = "0.1.0"
