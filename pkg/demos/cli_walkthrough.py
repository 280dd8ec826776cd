"""The command-line tool on the files in this directory.

Equivalent shell commands are shown before each step; the script calls the
same entry point in-process so it runs without installing the console script.
"""
import tempfile
from pathlib import Path

from timerob.cli import main

here = Path(__file__).parent
with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    steps = [
        ["casestudy", "running-example"],
        ["verify", "--trials", "200", "--fragment", "and-always"],
        ["export-lp", str(here / "integrator.json"), str(tmp / "integrator.lp")],
        ["synthesize", str(here / "integrator.json"), str(tmp / "result")],
        ["monitor", str(here / "integrator.stl"), str(tmp / "result" / "trajectory.csv")],
    ]
    for argv in steps:
        print("$ timerob " + " ".join(argv))
        code = main(argv)
        print(f"(exit {code})\n")
