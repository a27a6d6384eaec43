"""Command-line front end for bondspan."""
