"""Scan plug-ins: one module per heckelab subcommand."""
