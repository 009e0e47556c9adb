"""
Driving the command line from Python
====================================

Every CLI command writes a commented header and a plain CSV table, so the
output loads directly with numpy.
"""

# %%
import io
import tempfile
from pathlib import Path

import numpy as np

from jch import cli

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "band.csv"
    code = cli.main(["band", "--kappa", "0.02", "--k_points", "21", "--output", str(out)])
    print("exit code", code)
    print("".join(out.read_text().splitlines(keepends=True)[:4]), "...")
    body = "".join(l for l in out.read_text().splitlines(keepends=True) if not l.startswith("#"))
    data = np.genfromtxt(io.StringIO(body), delimiter=",", names=True)

lower = data[data["branch_index"] == 0]
print("lower band minimum:", lower["energy_over_beta"].min())
