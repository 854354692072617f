#!/usr/bin/env python3
"""End-to-end checks of the draco command line tool.

usage: cli_test.py <draco-binary> <test-data-dir>
"""

import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

DRACO = sys.argv[1]
DATA = Path(sys.argv[2])
SPECS = DATA / "specs"
failures = []


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("DRACO_KB", None)
    full_env.update(env or {})
    return subprocess.run([DRACO, *map(str, args)], capture_output=True, text=True, env=full_env)


def check(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + ("" if cond else f"  ({detail})"))
    if not cond:
        failures.append(name)


def main():
    tmp = Path(tempfile.mkdtemp(prefix="draco-cli-"))

    # validate
    r = run("validate", SPECS / "bar.json")
    check("validate valid spec exits 0", r.returncode == 0, r.stderr)
    circle = json.loads((SPECS / "bar.json").read_text())
    circle["view"][0]["mark"][0]["type"] = "circle"
    (tmp / "circle.json").write_text(json.dumps(circle))
    r = run("validate", tmp / "circle.json")
    check("validate circle mark exits 1", r.returncode == 1, r.returncode)
    check("validate circle mark prints invalid_domain", r.stdout.split() == ["invalid_domain"], r.stdout)
    (tmp / "bad.json").write_text("{not json")
    check("validate malformed JSON exits 2", run("validate", tmp / "bad.json").returncode == 2)
    check("validate missing file exits 2", run("validate", tmp / "nope.json").returncode == 2)
    partial = json.loads((SPECS / "bar.json").read_text())
    del partial["view"][0]["mark"][0]["type"]
    (tmp / "partial.json").write_text(json.dumps(partial))
    r = run("validate", tmp / "partial.json")
    check("validate incomplete spec exits 1", r.returncode == 1 and "missing" in r.stdout, r.stdout)

    # fact text input is interchangeable with JSON
    facts = "\n".join(
        [
            "attribute(number_rows,root,10).",
            "entity(field,root,f0).",
            'attribute((field,name),f0,"kind").',
            "attribute((field,type),f0,string).",
            "attribute((field,unique),f0,3).",
            "entity(view,root,v0).",
            "entity(mark,v0,m0).",
            "attribute((mark,type),m0,bar).",
            "entity(encoding,m0,e0).",
            "attribute((encoding,channel),e0,x).",
            'attribute((encoding,field),e0,"kind").',
            "entity(encoding,m0,e1).",
            "attribute((encoding,channel),e1,y).",
            "attribute((encoding,aggregate),e1,count).",
            "entity(scale,v0,s0).",
            "attribute((scale,channel),s0,x).",
            "attribute((scale,type),s0,categorical).",
            "entity(scale,v0,s1).",
            "attribute((scale,channel),s1,y).",
            "attribute((scale,type),s1,linear).",
        ]
    )
    (tmp / "bar.lp").write_text(facts + "\n")
    r = run("validate", tmp / "bar.lp")
    check("validate accepts fact text", r.returncode == 0, r.stdout + r.stderr)

    # schema
    r = run("schema", DATA / "seattle-weather.csv", "-o", tmp / "schema.json")
    schema = json.loads((tmp / "schema.json").read_text())
    check("schema exits 0", r.returncode == 0, r.stderr)
    check("schema has 240 rows and 5 fields", schema["number_rows"] == 240 and len(schema["fields"]) == 5)
    (tmp / "ragged.csv").write_text("a,b\n1\n")
    check("schema on ragged CSV exits 2", run("schema", tmp / "ragged.csv").returncode == 2)

    # complete
    r = run("complete", "--schema", tmp / "schema.json", "-k", 5, "-o", tmp / "out")
    check("complete exits 0", r.returncode == 0, r.stderr)
    manifest = json.loads((tmp / "out" / "costs.json").read_text())
    costs = [m["cost"] for m in manifest]
    check("complete writes 5 specs", len(manifest) == 5 and all((tmp / "out" / m["file"]).exists() for m in manifest))
    check("complete costs are non-decreasing", costs == sorted(costs), costs)
    top = json.loads((tmp / "out" / "spec_1.json").read_text())
    encodings = [e for v in top["view"] for m in v["mark"] for e in m.get("encoding", [])]
    check("complete top model counts records", any(e.get("aggregate") == "count" for e in encodings), encodings)
    run("complete", "--schema", tmp / "schema.json", "-k", 5, "-o", tmp / "again")
    same = all(
        (tmp / "out" / f).read_bytes() == (tmp / "again" / f).read_bytes()
        for f in ["costs.json"] + [m["file"] for m in manifest]
    )
    check("complete output is byte-stable", same)
    r1 = run("complete", "--schema", tmp / "schema.json", "-k", 1, "-o", tmp / "one")
    one = json.loads((tmp / "one" / "costs.json").read_text())
    check("complete -k 1 returns the cheapest", r1.returncode == 0 and one[0]["cost"] == costs[0])

    (tmp / "line_size.lp").write_text(
        ":- attribute((mark,type),M,T), entity(mark,_,M), T != line.\n"
        ":- not attribute((encoding,channel),_,size).\n"
    )
    r = run("complete", "--schema", tmp / "schema.json", "-k", 3, "--hint", tmp / "line_size.lp", "-o", tmp / "ls")
    check("line with size completes to nothing, exit 0", r.returncode == 0, r.stderr)
    check("line with size writes an empty manifest", json.loads((tmp / "ls" / "costs.json").read_text()) == [])
    check("line with size warns", "warning" in r.stderr, r.stderr)
    (tmp / "choice.lp").write_text("{ attribute((mark,type),m0,V) : domain((mark,type),V) } = 1.\n")
    r = run("complete", "--schema", tmp / "schema.json", "--hint", tmp / "choice.lp", "-o", tmp / "ch")
    check("choice rule hint exits 2", r.returncode == 2, r.returncode)
    (tmp / "w.json").write_text('{"no_such_constraint": 3}')
    r = run("complete", "--schema", tmp / "schema.json", "--weights", tmp / "w.json", "-o", tmp / "w")
    check("unknown weight exits 2", r.returncode == 2, r.returncode)

    # render
    r = run("render", SPECS / "bar.json")
    check("render matches the golden", r.stdout == (DATA / "golden" / "bar.vl.json").read_text())
    r = run("render", SPECS / "bar.json", "--data", DATA / "seattle-weather.csv", "-o", tmp / "bar.vl.json")
    doc = json.loads((tmp / "bar.vl.json").read_text())
    check("render inlines data", r.returncode == 0 and len(doc["data"]["values"]) == 240)
    check("render incomplete spec exits 2", run("render", tmp / "partial.json").returncode == 2)

    # debug
    r = run("debug", SPECS, "-o", tmp / "m.csv", "--chart", tmp / "debug.vl.json")
    rows = (tmp / "m.csv").read_text().splitlines()
    check("debug exits 0", r.returncode == 0, r.stderr)
    check("debug has a row per spec", len(rows) == 1 + len(list(SPECS.glob("*.json"))), len(rows))
    check("debug last column is cost", rows[0].split(",")[-1] == "cost")
    check("debug chart is an hconcat", len(json.loads((tmp / "debug.vl.json").read_text())["hconcat"]) == 2)
    check("debug on a file exits 2", run("debug", SPECS / "bar.json").returncode == 2)

    # learn
    bar = json.loads((SPECS / "bar.json").read_text())
    off_x = json.loads((SPECS / "datetime_on_y.json").read_text())
    (tmp / "pairs.json").write_text(json.dumps({"pairs": [{"better": bar, "worse": off_x}]}))
    a = run("learn", tmp / "pairs.json", "--seed", 7)
    b = run("learn", tmp / "pairs.json", "--seed", 7)
    check("learn exits 0", a.returncode == 0, a.stderr)
    check("learn is byte-stable per seed", a.stdout == b.stdout)
    weights = json.loads(a.stdout)
    check("learn writes integer weights", all(isinstance(v, int) for v in weights.values()))
    check("learn reports accuracy", "pair accuracy" in a.stderr)

    # kb
    r = run("kb", "list")
    check("kb list shows hard and soft blocks", "hard\tinvalid_domain" in r.stdout and "soft\ttime_not_x" in r.stdout)
    r = run("kb", "show", "invalid_domain")
    check("kb show prints the block", r.returncode == 0 and "violation(invalid_domain)" in r.stdout, r.stdout)
    check("kb show unknown block exits 2", run("kb", "show", "nope").returncode == 2)

    # DRACO_KB points at an edited copy
    run("kb", "export", tmp / "kb")
    w = json.loads((tmp / "kb" / "weights.json").read_text())
    w["time_not_x"] += 10
    (tmp / "kb" / "weights.json").write_text(json.dumps(w))
    base = run("validate", SPECS / "datetime_on_y.json").stdout
    edited = run("validate", SPECS / "datetime_on_y.json", env={"DRACO_KB": str(tmp / "kb")}).stdout
    flag = run("validate", SPECS / "datetime_on_y.json", "--kb", tmp / "kb").stdout
    cost = lambda s: int(s.split()[-1])
    check("DRACO_KB selects the knowledge base", cost(edited) == cost(base) + 10, (base, edited))
    check("--kb matches DRACO_KB", flag == edited)
    check("bad DRACO_KB exits 2", run("kb", "list", env={"DRACO_KB": str(tmp / "none")}).returncode == 2)

    # usage
    check("no subcommand exits 2", run().returncode == 2)
    check("unknown flag exits 2", run("validate", SPECS / "bar.json", "--frobnicate").returncode == 2)
    check("help exits 0", run("--help").returncode == 0)

    print(f"{len(failures)} failed")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
