"""Finance-property verifier for a core Solidity subset."""

__version__ = "0.1.0"
