"""Replay the four worked constructions end to end and print the
checklists.  Exit code 1 when any check fails.

Usage:  python3 scripts/replay_examples.py [ex52 ex511 ex62 ex61_ledger]
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from toricfano.cli import main

if __name__ == "__main__":
    names = sys.argv[1:] or ["ex61_ledger", "ex52", "ex511", "ex62"]
    worst = 0
    for name in names:
        print(f"== replay {name} ==")
        worst = max(worst, main(["replay", name]))
        print()
    sys.exit(worst)
