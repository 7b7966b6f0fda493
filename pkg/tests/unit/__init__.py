"""Unit tests for onedocs-auth service."""
