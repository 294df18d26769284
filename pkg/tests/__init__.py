"""Test utilities and mocks for bishop-discs."""
