"""Unit tests for bondspan."""
