"""Exit codes, output files and report determinism of the command-line tool."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

exe, config = sys.argv[1], sys.argv[2]
failures = 0


def run(workdir, *args):
    return subprocess.run([exe, *args, "--config", config, "-q"], cwd=workdir,
                          capture_output=True, text=True).returncode


def expect(name, ok):
    global failures
    print(("ok   " if ok else "FAIL ") + name)
    failures += 0 if ok else 1


def report(workdir, cmd):
    data = json.loads((Path(workdir) / "out" / f"{cmd}.json").read_text())
    data.pop("timings", None)
    return data


with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
    expect("verify exit 0", run(a, "verify") == 0)
    expect("verify rerun exit 0", run(b, "verify") == 0)
    expect("verify reports identical", report(a, "verify") == report(b, "verify"))
    expect("schema_version", report(a, "verify")["schema_version"] == 1)

    expect("build exit 0", run(a, "build") == 0)
    expect("build csvs", (Path(a) / "out" / "sequences.csv").exists() and (Path(a) / "out" / "gaps.csv").exists())
    expect("invalid delta exit 2", run(a, "build", "--set", "params.delta=-1") == 2)
    expect("unknown key exit 2", run(a, "build", "--set", "params.bogus=1") == 2)
    expect("impossible tolerance exit 1", run(a, "verify", "--set", "tolerances.invariance=1e-20") == 1)

    expect("portrait small", run(a, "portrait", "--set", "portrait.orbits=1", "--set", "portrait.steps=0",
                                 "--set", "portrait.curve_samples=4") == 0)
    rows = (Path(a) / "out" / "portrait.csv").read_text().splitlines()
    expect("portrait echoes initial point", len(rows) == 1 + 4 + 1 and rows[-1].startswith("1,0,"))

    expect("manifolds exit 0", run(a, "manifolds") == 0)
    expect("diffusion two offsets", run(a, "diffusion", "--set", "diffusion.offsets=0,-1e-3",
                                        "--set", "diffusion.steps=1000") == 0)
    expect("diffusion sections", len(report(a, "diffusion")["details"]["probes"]) == 2)
    expect("regularity M=8", run(a, "regularity", "--set", "params.M=8") == 0)
    csv = (Path(a) / "out" / "regularity.csv").read_text().splitlines()
    expect("regularity rows", len(csv) == 1 + 15)

sys.exit(1 if failures else 0)
