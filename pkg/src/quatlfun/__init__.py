"""quatlfun: exact quaternionic p-adic L-elements and supporting machinery."""

__version__ = "0.1.0"
