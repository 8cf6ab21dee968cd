"""Allows `python -m lumen` as an alias for the console script."""
from .cli import entrypoint

entrypoint()
