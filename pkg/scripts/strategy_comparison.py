"""Mu vs RaReMu vs LaReMu on the 8-layer VQC."""
import sys

from _grid import run_grid

GRID = {s: ["--agent", "vqc", "--layers", "8", "--strategy", s] for s in ("mu", "raremu", "laremu")}

if __name__ == "__main__":
    sys.exit(run_grid("strategies", GRID, sys.argv[1:]))
