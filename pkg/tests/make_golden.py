#!/usr/bin/env python3
"""Regenerate tests/golden.json from the independent oracles.

Run from the repository root:  python tests/make_golden.py
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from oracles import compute_all


def main() -> None:
    values = compute_all()
    path = pathlib.Path(__file__).parent / "golden.json"
    path.write_text(json.dumps(values, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {len(values)} golden values to {path}")


if __name__ == "__main__":
    main()
