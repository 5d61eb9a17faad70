#!/usr/bin/env python3
"""Runs each CLI subcommand on the bundled instances and validates the
reports against schemas/."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

cli, root = sys.argv[1], pathlib.Path(sys.argv[2])
schemas = {p.name.split(".")[0]: json.loads(p.read_text()) for p in (root / "schemas").glob("*.json")}
inst = root / "instances"


def check(schema, args, status=0):
    run = subprocess.run([cli, *args], capture_output=True, text=True)
    if run.returncode != status:
        sys.exit(f"{args}: exit {run.returncode}, expected {status}\n{run.stdout}{run.stderr}")
    doc = json.loads(run.stdout)
    jsonschema.validate(doc, schemas[schema])
    print(f"ok {schema}: {' '.join(args)}")
    return doc


for name in ("example1", "ex1_hard", "example2"):
    jsonschema.validate(json.loads((inst / f"{name}.json").read_text()), schemas["game"])
check("analysis", ["analyze", str(inst / "example1.json")])
check("analysis", ["analyze", str(inst / "example2.json")], status=2)
check("classification", ["classify", str(inst / "ex1_hard.json"), "--w", "1,1"])
check("classification", ["classify", str(inst / "ex1_hard.json"), "--w", "0.9,0.9"])
check("orbit", ["orbit", str(inst / "ex1_hard.json"), "--delta", "0.4"])
check("solution", ["solve", str(inst / "example1.json"), "--epsilon", "0.05"])
a = check("solution", ["solve", str(inst / "ex1_hard.json"), "--delta", "0.4"])
b = check("solution", ["solve", str(inst / "ex1_hard.json"), "--delta", "0.4"])
if a != b:
    sys.exit("solve is not deterministic")
check("deviations", ["verify", str(inst / "example1.json"), "--episodes", "2000", "--deviations", "d1,d4", "--player", "1"])
check("simulation", ["simulate", str(inst / "ex1_hard.json"), "--delta", "0.4", "--episodes", "2000"])
check("error", ["solve", str(inst / "example2.json")], status=2)
check("error", ["analyze", str(inst / "missing.json")], status=4)
with tempfile.TemporaryDirectory() as tmp:
    out = pathlib.Path(tmp) / "g.json"
    subprocess.run([cli, "gen", "--players", "2", "--actions", "4", "--seed", "7", "--out", str(out)], check=True)
    jsonschema.validate(json.loads(out.read_text()), schemas["game"])
    rep = check("analysis", ["analyze", str(out)])
    if not rep["structure"]["precondition"]["pass"]:
        sys.exit("generated instance has a rectangular component")
print("all schemas ok")
