# The egh command on JSON files, driven from Python.

# %%
import json
import tempfile
from pathlib import Path

from egh.cli import main

work = Path(tempfile.mkdtemp())
(work / "two.json").write_text(json.dumps({"format": 1, "dist": [[0, 1], [1, 0]]}))
(work / "wide.json").write_text(json.dumps({"format": 1, "dist": [[0, 1.2], [1.2, 0]]}))
(work / "t.json").write_text(json.dumps({"format": 1, "source": "two.json",
                                         "target": "wide.json",
                                         "f": [0, 1], "theta": [0, 1], "psi": [0, 1]}))

# %%
for argv in (["validate", "two.json"],
             ["dist", "two.json", "wide.json"],
             ["check-triple", "t.json"]):
    out = work / (argv[0] + ".out.json")
    code = main([str(work / a) if a.endswith(".json") else a for a in argv] + ["--out", str(out)])
    print(" ".join(argv), "-> exit", code)
    print(out.read_text()[:300])
