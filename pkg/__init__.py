"""Average-tempered stable subordinators and their applications."""

__version__ = "0.1.0"
