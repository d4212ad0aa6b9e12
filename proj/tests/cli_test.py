#!/usr/bin/env python3
"""Exit-code checks for the hgdo command line tool.

usage: cli_test.py <hgdo binary> <source dir>
"""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

HGDO = sys.argv[1]
ROOT = Path(sys.argv[2])
CONFIGS = ROOT / "configs"
failures = []


def run(*args):
    return subprocess.run([HGDO, *map(str, args)], capture_output=True, text=True)


def expect(name, proc, code):
    if proc.returncode != code:
        failures.append(f"{name}: exit {proc.returncode}, wanted {code}\n{proc.stdout}{proc.stderr}")
    else:
        print(f"ok   {name}")


def write(tmp, name, obj):
    p = Path(tmp) / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return p


with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "out"
    expect("simulate ok", run("simulate", CONFIGS / "hover_constant.json", "--out", out), 0)
    for f in ("trace.csv", "metrics.json", "xy.svg", "timeseries.svg", "estimates.svg"):
        if not (out / f).is_file():
            failures.append(f"simulate did not write {f}")

    expect("plot timeseries", run("plot", out / "trace.csv", "--kind", "timeseries", "--out", Path(tmp) / "p.svg"), 0)
    if not (Path(tmp) / "p.svg").read_text().lstrip().startswith("<"):
        failures.append("plot output is not SVG")
    expect("plot missing trace", run("plot", Path(tmp) / "absent.csv"), 3)
    expect("plot malformed trace", run("plot", write(tmp, "junk.csv", "t,x\r\n1,2\r\n"), "--out", Path(tmp) / "j.svg"), 1)

    expect("check-bounds composite", run("check-bounds", CONFIGS / "lemniscate_composite.json"), 0)
    # Dryden gusts have no analytic derivative bound.
    expect("check-bounds dryden", run("check-bounds", CONFIGS / "lemniscate_dryden.json"), 3)

    base = json.loads((CONFIGS / "hover_constant.json").read_text())
    bad = dict(base, colour="red")
    expect("unknown key", run("simulate", write(tmp, "bad.json", bad), "--out", Path(tmp) / "o2"), 3)
    neg = json.loads(json.dumps(base))
    neg["observer"]["epsilon1"] = -0.1
    expect("negative epsilon", run("simulate", write(tmp, "neg.json", neg), "--out", Path(tmp) / "o3"), 3)
    expect("malformed json", run("simulate", write(tmp, "junk.json", "{ not json"), "--out", Path(tmp) / "o4"), 3)
    noseed = json.loads(json.dumps(base))
    noseed["noise"] = {"x2": [0.01, 0.01, 0.01], "x4": [0.0, 0.0, 0.0]}
    noseed["run"].pop("seed", None)
    env_free = subprocess.run([HGDO, "simulate", str(write(tmp, "noseed.json", noseed)), "--out", str(Path(tmp) / "o5")],
                              capture_output=True, text=True, env={"PATH": "/usr/bin:/bin"})
    expect("stochastic without seed", env_free, 3)

    # Measurement noise at this power drives the loop unstable.
    wild = json.loads(json.dumps(noseed))
    wild["run"]["seed"] = 3
    o6 = Path(tmp) / "o6"
    expect("diverged", run("simulate", write(tmp, "wild.json", wild), "--out", o6), 2)
    if (o6 / "metrics.json").is_file():
        if json.loads((o6 / "metrics.json").read_text())["status"] != "diverged":
            failures.append("diverged run did not report status 'diverged'")
    else:
        failures.append("diverged run wrote no metrics.json")

    expect("compare", run("compare", CONFIGS / "hover_constant.json", CONFIGS / "ground_effect.json"), 0)
    expect("sweep", run("sweep", CONFIGS / "hover_constant.json", "--eps", "0.01,0.04", "--smc-only"), 0)

for f in failures:
    print("FAIL", f)
sys.exit(1 if failures else 0)
