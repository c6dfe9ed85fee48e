"""Shared helper: run a named grid of harness invocations under one output root."""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from evoqrl.harness import main  # noqa: E402


def run_grid(name: str, grid: dict[str, list[str]], argv: list[str]) -> int:
    """``argv`` is forwarded to every run, e.g. ``--generations 50 --seeds 0,1``."""
    root = Path("runs") / name
    if "--out" in argv:
        i = argv.index("--out")
        root = Path(argv[i + 1])
        argv = argv[:i] + argv[i + 2:]
    status = 0
    for label, args in grid.items():
        print(f"[{name}] {label}", flush=True)
        status |= main(args + argv + ["--out", str(root / label)])
    for label in grid:
        rows = (root / label / "aggregate.csv").read_text().splitlines()[1:]
        tail = [float(r.split(",")[1]) for r in rows[-20:]]
        print(f"{label:>12}  final-20 mean score {sum(tail) / len(tail):7.3f}")
    return status
