"""bondspan - single-sample stochastic spanning trees and matroids."""

__version__ = "0.1.0"
__author__ = "bondspan developers"
