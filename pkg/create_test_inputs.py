#!/usr/bin/env python3
"""
Write sample input documents for trying the semicech commands
"""

import json
from pathlib import Path

OUT = Path("samples")

BOOL_MODULE = {"add": [[0, 1], [1, 1]], "scalar": [[0, 0], [0, 1]]}

SAMPLES = {
    # B -> B with d+ = d- = id: H^0 = B, H^1 = 0
    "constant_complex.json": {
        "ring": "boolean",
        "modules": [BOOL_MODULE, BOOL_MODULE],
        "d_plus": [[0, 1]],
        "d_minus": [[0, 1]],
        "name": "constB",
    },
    # d+ d+ != d- d-: check complex exits 1
    "broken_complex.json": {
        "ring": "boolean",
        "modules": [BOOL_MODULE] * 3,
        "d_plus": [[0, 1], [0, 1]],
        "d_minus": [[0, 0], [0, 0]],
    },
    "constant_sheaf.json": {"ring": "boolean", "sets": [["a", "b"], ["b", "c"]], "constant": BOOL_MODULE},
    "chain3.json": {
        "semiring": {"add": [[0, 1, 2], [1, 1, 2], [2, 2, 2]], "mul": [[0, 0, 0], [0, 1, 1], [0, 1, 2]], "one": 2, "name": "chain3"}
    },
    "degree_two_line.json": {"n": 1, "entries": {"0,1": {"q": "3/2", "exp": [2, -2]}}},
    "half_torus_cover.json": {
        "ring": "qmax",
        "g": [1, 0],
        "fs": [
            {"vars": 2, "terms": [{"exp": [0, 1]}]},
            {"vars": 2, "terms": [{"exp": [2, 0], "coef": "5"}]},
        ],
        "degree": 1,
    },
    "bool_modules.json": {"ring": "boolean", "modules": [BOOL_MODULE, BOOL_MODULE, BOOL_MODULE]},
}

OUT.mkdir(exist_ok=True)
for name, doc in SAMPLES.items():
    (OUT / name).write_text(json.dumps(doc, indent=2) + "\n")
    print(f"Created {OUT / name}")
