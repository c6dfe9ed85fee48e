"""Mutation-only VQC with 4, 6, 8 and 16 layers (76 to 292 parameters)."""
import sys

from _grid import run_grid

GRID = {f"vqc-{n}": ["--agent", "vqc", "--strategy", "mu", "--layers", str(n)] for n in (4, 6, 8, 16)}

if __name__ == "__main__":
    sys.exit(run_grid("layers", GRID, sys.argv[1:]))
