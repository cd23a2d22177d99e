"""Static security analyzer and attack simulator for ERC-20 token contracts."""

__version__ = "0.1.0"
