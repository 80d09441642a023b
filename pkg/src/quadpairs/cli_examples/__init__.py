"""Bundled example covers and their self-checking reproductions."""

from .examples import EXAMPLE_IDS, ExampleMismatch, ExampleScript, expected_table, run_example

__all__ = ["EXAMPLE_IDS", "ExampleMismatch", "ExampleScript", "expected_table", "run_example"]
