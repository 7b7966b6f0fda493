"""Integration tests for onedocs-auth service."""
