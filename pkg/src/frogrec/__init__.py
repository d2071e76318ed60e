"""Multi-modal friend recommendation with co-attention matching and local/global preference heads."""

__version__ = "0.1.0"
