"""folnerspec test suite."""
