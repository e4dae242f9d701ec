"""Black-box checks of the liouville binary: exit codes, JSON schemas, CSV
shape and byte-for-byte determinism.

usage: cli_contract.py <liouville binary> <schema dir>
"""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

BINARY = sys.argv[1]
SCHEMAS = pathlib.Path(sys.argv[2])
failures = []


def run(*args):
    proc = subprocess.run([BINARY, *args], capture_output=True, timeout=120)
    return proc.returncode, proc.stdout, proc.stderr.decode()


def expect(condition, what):
    print(("ok    " if condition else "FAIL  ") + what)
    if not condition:
        failures.append(what)


def schema(command):
    with open(SCHEMAS / f"{command}.v1.schema.json") as fh:
        return json.load(fh)


def validate(command, payload, label):
    try:
        doc = json.loads(payload)
        jsonschema.validate(doc, schema(command))
    except (json.JSONDecodeError, jsonschema.ValidationError) as err:
        expect(False, f"{label}: {err}")
        return None
    expect(True, f"{label}: valid {command} v1 document")
    return doc


for command in ("classify", "construct", "verify", "sweep"):
    jsonschema.Draft202012Validator.check_schema(schema(command))

closed = ["--n", "3", "--p", "2", "--power", "4"]

exit_cases = [
    (["classify", "--n", "4", "--p", "2", "--power", "2"], 0),
    (["classify", "--n", "4", "--p", "2", "--power", "2.5"], 1),
    (["classify", "--n", "3", "--p", "2", "--powerlog", "-1"], 0),
    (["classify", "--n", "3", "--p", "2", "--expr", "z^3 * log(e + 1/z)^(-1.05)"], 2),
    (["classify", "--n", "2", "--p", "2", "--power", "3"], 10),
    (["classify", "--n", "3", "--p", "2", "--expr", "z^^2"], 11),
    (["classify", "--n", "3", "--p", "2"], 13),
    (["classify", "--n", "3", "--p", "2", "--expr", "1 - z"], 15),
    (["construct", "--n", "4", "--p", "2", "--power", "2"], 1),
    (["verify", *closed], 0),
    (["verify", *closed, "--delta", "1e6"], 1),
    (["verify", "--n", "3", "--p", "2", "--expr", "0"], 0),
]
for args, code in exit_cases:
    got, _, err = run(*args)
    expect(got == code, f"exit {code} for {' '.join(args)} (got {got}{'; ' + err.strip() if got != code else ''})")

documents = [
    ("classify", ["classify", "--n", "4", "--p", "2", "--power", "2"]),
    ("classify", ["classify", "--n", "3", "--p", "2", "--expr", "z^3 * log(e + 1/z)^(-2)"]),
    ("construct", ["construct", *closed]),
    ("verify", ["verify", *closed]),
    ("verify", ["verify", *closed, "--delta", "1e6"]),
    ("sweep", ["sweep", "--n", "4", "--p", "2", "--from", "1.5", "--to", "3.5", "--step", "0.25"]),
    ("sweep", ["sweep", "--n", "3", "--p", "2", "--family", "powerlog", "--from", "-2", "--to", "0",
               "--step", "0.5"]),
]
for command, args in documents:
    _, first, _ = run(*args, "--format", "json")
    _, second, _ = run(*args, "--format", "json")
    doc = validate(command, first, " ".join(args))
    expect(first == second, f"byte-identical JSON across runs: {' '.join(args)}")
    if command == "construct" and doc:
        expect(abs(doc["rows"][0]["w"] - 1 / 6) <= 1e-6, "construct r = 0 row has w = 1/6")

_, csv, _ = run("construct", *closed, "--format", "csv")
lines = csv.decode().split("\n")
expect(lines[0] == "r,w,envelope,bound", "construct CSV header")
expect(b"\r" not in csv and csv.endswith(b"\n"), "CSV uses LF line endings")
radii = [float(line.split(",")[0]) for line in lines[1:] if line]
expect(all(a < b for a, b in zip(radii, radii[1:])), "construct rows strictly increasing in r")

_, empty, _ = run("sweep", "--n", "4", "--p", "2", "--from", "3", "--to", "2", "--step", "1")
expect(empty == b"lambda,verdict,method,K_f,delta,sup_w,error\n", "empty sweep is header only")

with tempfile.TemporaryDirectory() as tmp:
    target = pathlib.Path(tmp) / "report.json"
    code, stdout, _ = run("verify", *closed, "--format", "json", "--out", str(target))
    expect(code == 0 and stdout == b"", "--out leaves stdout empty")
    validate("verify", target.read_bytes(), "--out file")

print(f"{len(failures)} contract failure(s)")
sys.exit(1 if failures else 0)
