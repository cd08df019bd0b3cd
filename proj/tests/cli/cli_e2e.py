# Copyright 2026 The lolysim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""End-to-end exercise of every lolysim subcommand.

Usage: cli_e2e.py <path-to-lolysim-binary>
"""

import csv
import json
import random
import subprocess
import sys
import tempfile
from pathlib import Path


def run(binary, *args):
    proc = subprocess.run([str(binary), *args], capture_output=True, text=True)
    if proc.returncode != 0:
        raise SystemExit(
            f"command failed ({proc.returncode}): {' '.join(map(str, args))}\n"
            f"stderr: {proc.stderr}"
        )
    return proc


def write_traces(directory):
    for seed in range(3):
        rng = random.Random(seed + 17)
        high = rng.uniform(8e6, 14e6)
        low = high * rng.uniform(0.3, 0.5)
        phase = rng.randint(20, 40)
        lines = [f"# e2e trace {seed}"]
        for t in range(400):
            level = low if (t // phase) % 2 == 0 else high
            lines.append(f"{level * rng.lognormvariate(0, 0.2):.1f}")
        (directory / f"trace{seed}.txt").write_text("\n".join(lines) + "\n")


def main():
    binary = Path(sys.argv[1]).resolve()
    work = Path(tempfile.mkdtemp(prefix="lolysim-e2e-"))
    traces = work / "traces"
    traces.mkdir()
    write_traces(traces)
    trace_files = sorted(str(p) for p in traces.iterdir())

    # stats: one row per (trace, interval).
    run(binary, "stats", *trace_files, "--intervals", "1,2,5", "--out",
        str(work / "stats.csv"))
    with open(work / "stats.csv") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 3 * 3, rows
    assert all(float(r["mean_bps"]) > 0 for r in rows)

    # predict-eval: quantiles are non-decreasing per (scale, side).
    run(binary, "predict-eval", *trace_files, "--method", "SMA:1:ar", "--scales",
        "1..5", "--quantiles", "0.2,0.5,0.9", "--out", str(work / "quant.csv"),
        "--errors-out", str(work / "raw.csv"))
    with open(work / "quant.csv") as f:
        quant = list(csv.DictReader(f))
    assert len(quant) == 5 * 2 * 3, len(quant)
    by_key = {}
    for row in quant:
        by_key.setdefault((row["scale_s"], row["side"]), []).append(
            (float(row["quantile"]), float(row["value"]) if row["value"] else None))
    for values in by_key.values():
        values.sort()
        present = [v for _, v in values if v is not None]
        assert present == sorted(present), values

    # fit-errors: lomax params positive, KS within [0, 1].
    run(binary, "fit-errors", str(work / "raw.csv"), "--family", "lomax", "--side",
        "over", "--out", str(work / "fit.json"))
    fit = json.loads((work / "fit.json").read_text())
    assert fit["status"] == "ok", fit
    assert fit["params"]["alpha"] > 0 and fit["params"]["lambda"] > 0
    assert 0.0 <= fit["ks_statistic"] <= 1.0

    # sweep twice: byte-identical outputs.
    spec = {
        "sim": {
            "predictor": "SMA:1:ar",
            "session_length_s": 200,
            "catalog": {"tau": 2, "delta_p": 5, "n_segments": 150,
                        "variation_cv": 0.1, "seed": 3},
        },
        "lolypop": {"sigma_star": [0.02, 0.1], "omega_star": [0.02, 0.1]},
        "festive": {"alpha": [12], "p": [0.6, 0.85], "k": [2, 20]},
        "lowest": True,
    }
    (work / "sweep.json").write_text(json.dumps(spec))
    run(binary, "sweep", "--spec", str(work / "sweep.json"), "--traces", str(traces),
        "--out", str(work / "res1"))
    run(binary, "sweep", "--spec", str(work / "sweep.json"), "--traces", str(traces),
        "--out", str(work / "res2"), "--threads", "1")
    for name in ("results.csv", "region.csv"):
        a = (work / "res1" / name).read_bytes()
        b = (work / "res2" / name).read_bytes()
        assert a == b, f"{name} differs between runs"

    with open(work / "res1" / "results.csv") as f:
        results = list(csv.DictReader(f))
    n_configs = 2 * 2 + 1 * 2 * 2 + 1
    assert len(results) == n_configs * (3 + 1), len(results)
    assert sum(r["trace_id"] == "mean-over-traces" for r in results) == n_configs

    # frontier + compare run through on the sweep output.
    run(binary, "frontier", "--results", str(work / "res1"), "--omega", "0.05,0.2",
        "--out", str(work / "frontier.csv"))
    run(binary, "compare", "--frontier", str(work / "frontier.csv"), "--a", "lolypop",
        "--b", "festive", "--out", str(work / "cmp.json"))
    cmp_doc = json.loads((work / "cmp.json").read_text())
    assert cmp_doc["a"] == "lolypop" and cmp_doc["comparisons"], cmp_doc

    # example-run: aligned series and a valid report.
    session = dict(spec["sim"], algorithm="lolypop",
                   lolypop={"sigma_star": 0.05, "omega_star": 0.1})
    (work / "session.json").write_text(json.dumps(session))
    run(binary, "example-run", "--config", str(work / "session.json"), "--trace",
        trace_files[0], "--out", str(work / "run"))
    report = json.loads((work / "run" / "report.json").read_text())
    assert report["n_accounted"] == report["n_played"] + report["n_skipped"]
    with open(work / "run" / "events.csv") as f:
        events = list(csv.DictReader(f))
    assert len(events) == report["n_accounted"]
    selections = (work / "run" / "series_selections.csv").read_text().strip().splitlines()
    buffers = (work / "run" / "series_buffer.csv").read_text().strip().splitlines()
    assert len(selections) == len(buffers) == report["n_accounted"] + 1

    # Bad inputs exit nonzero.
    bad = subprocess.run([str(binary), "stats", str(work / "missing.txt")],
                         capture_output=True)
    assert bad.returncode != 0

    print("cli e2e: ok")


if __name__ == "__main__":
    main()
