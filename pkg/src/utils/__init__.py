"""Utility functions for bondspan."""
