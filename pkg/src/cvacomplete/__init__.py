"""CVA on unbooked positions: firm-level Goodwill and the contingent funding of collateralized swaps."""

__version__ = "0.1.0"
