"""fleetwarden: fleet monitoring and remote administration over a shared ledger."""

__version__ = "0.1.0"
