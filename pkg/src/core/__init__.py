"""Graphs, distributions, the single-sample model, matroids and verification."""
