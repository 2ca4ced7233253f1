#!/usr/bin/env python3
"""Re-derives the frozen remark expectations and fails if they drifted."""
import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))
import remark_oracle  # noqa: E402

d = pathlib.Path(sys.argv[1])
fresh = remark_oracle.read(d / "remarks_clang14.txt")
frozen = json.loads((d / "remarks_clang14.expected.json").read_text())
if fresh != frozen:
    print("frozen remark expectations differ from the oracle")
    sys.exit(1)
print(f"{len(frozen['loops'])} records, {frozen['remark_lines']} remark lines: frozen data matches the oracle")
