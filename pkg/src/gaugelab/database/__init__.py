"""Run ledger."""
