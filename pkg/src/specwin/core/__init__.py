"""Core modules for SpecWin."""
