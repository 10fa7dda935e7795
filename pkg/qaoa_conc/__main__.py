"""QAOA concentration toolkit CLI."""
from .cli import main

main()
