"""Exact solver for rational solutions of autonomous first-order algebraic
ordinary difference equations F(y(x), y(x+1)) = 0."""

__version__ = "0.1.0"
