"""Integration tests for bondspan."""
