"""Display modules for CLI output formatting."""
