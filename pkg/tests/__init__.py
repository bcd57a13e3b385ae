"""Init for tests."""
