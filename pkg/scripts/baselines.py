"""8-layer VQC against the random agent and the two MLP sizes, all mutation-only."""
import sys

from _grid import run_grid

GRID = {
    "vqc-148": ["--agent", "vqc", "--layers", "8"],
    "nn-147": ["--agent", "nn", "--hidden", "3,4"],
    "nn-6788": ["--agent", "nn", "--hidden", "64,64"],
    "random": ["--agent", "random"],
}

if __name__ == "__main__":
    sys.exit(run_grid("baselines", GRID, sys.argv[1:]))
