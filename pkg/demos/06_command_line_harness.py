"""
The experiment harness
======================

Every subcommand of ``qpwegner`` writes a CSV table, a JSON summary, and a
manifest that reproduces the run.  This script drives it in-process.
"""

# %%
import json
import os
import tempfile

from qpwegner.cli import main

out = tempfile.mkdtemp(prefix="qpwegner-demo-")
code = main(["wegner-qp1", "--omega-samples", "4000", "--out", out])
print("exit code", code)

# %%
with open(os.path.join(out, "wegner-qp1.csv")) as fh:
    print(fh.read())
with open(os.path.join(out, "wegner-qp1.json")) as fh:
    summary = json.load(fh)["summary"]
print("slope", round(summary["slope"], 3), "n0", summary["n0"])

# %%
# Rerunning from the manifest gives identical bytes.
again = os.path.join(out, "again")
main(["wegner-qp1", "--config", os.path.join(out, "wegner-qp1.manifest.txt"), "--out", again,
      "--threads", "2"])
same = all(open(os.path.join(out, f), "rb").read() == open(os.path.join(again, f), "rb").read()
           for f in ("wegner-qp1.csv", "wegner-qp1.json", "wegner-qp1.manifest.txt"))
print("byte-identical rerun:", same)
