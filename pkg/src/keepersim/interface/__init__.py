"""CLI and HTTP service entry points."""
