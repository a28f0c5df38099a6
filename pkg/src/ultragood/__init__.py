"""Exact verification harness for p-adic good-function estimates."""

__version__ = "0.1.0"
