"""SpecWin utility modules."""
