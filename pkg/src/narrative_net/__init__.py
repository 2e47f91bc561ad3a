"""Character-relationship network extraction, cleaning and analysis for narrative corpora."""

__version__ = "0.1.0"
