"""Test package for bondspan."""
