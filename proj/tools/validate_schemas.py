#!/usr/bin/env python3
"""Check the published JSON schemas against real inputs and outputs.

Validates every sample scenario against schemas/scenario.schema.json, runs the
CLI once and validates the produced report against schemas/report.schema.json
(which pulls in the scenario schema through the echoed scenario block), and
rejects a few deliberately malformed documents so the schemas stay strict.

usage: validate_schemas.py SOURCE_DIR LAPLAB_BINARY
"""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

PROBE_SCENARIO = {
    "model": {"family": "fundamental", "n": 12},
    "checks": ["hypotheses", "mourre", "h4", "lap-scan", "dynamics", "dilation"],
    "settings": {
        "radii": [0.5, 0.8],
        "angular_points": 8,
        "horizon": 16,
        "dilation_depth": 3,
        "seed": 7,
    },
}

BAD_SCENARIOS = [
    ("unknown model family", {"model": {"family": "sideways-shift"}}),
    ("missing model", {"checks": ["hypotheses"]}),
    ("unknown settings key", {"model": {"family": "fundamental"}, "settings": {"bogus": 1}}),
    ("unknown check", {"model": {"family": "fundamental"}, "checks": ["h5"]}),
    ("duplicate check", {"model": {"family": "fundamental"}, "checks": ["h4", "h4"]}),
    ("radius outside disk", {"model": {"family": "fundamental"}, "settings": {"radii": [1.0]}}),
]


def load(path):
    return json.loads(path.read_text())


def report_errors(label, errors):
    errors = list(errors)
    for err in errors:
        where = "/".join(str(p) for p in err.absolute_path) or "(root)"
        print(f"FAIL {label}: {where}: {err.message}")
    return len(errors)


def main():
    if len(sys.argv) != 3:
        print(__doc__.strip().splitlines()[-1], file=sys.stderr)
        return 2
    src = pathlib.Path(sys.argv[1])
    binary = sys.argv[2]

    scenario_schema = load(src / "schemas" / "scenario.schema.json")
    report_schema = load(src / "schemas" / "report.schema.json")
    registry = Registry().with_resources(
        [
            (scenario_schema["$id"], Resource.from_contents(scenario_schema)),
            (report_schema["$id"], Resource.from_contents(report_schema)),
        ]
    )
    scenario_validator = jsonschema.Draft7Validator(scenario_schema, registry=registry)
    report_validator = jsonschema.Draft7Validator(report_schema, registry=registry)

    failures = 0

    samples = sorted((src / "scenarios").glob("*.json"))
    if not samples:
        print("FAIL no sample scenarios found")
        return 1
    for sample in samples:
        n = report_errors(sample.name, scenario_validator.iter_errors(load(sample)))
        failures += n
        if n == 0:
            print(f"ok   {sample.name}")

    for label, doc in BAD_SCENARIOS:
        if scenario_validator.is_valid(doc):
            print(f"FAIL schema accepts invalid scenario: {label}")
            failures += 1
        else:
            print(f"ok   rejects {label}")

    with tempfile.TemporaryDirectory() as tmp:
        config = pathlib.Path(tmp) / "probe.json"
        config.write_text(json.dumps(PROBE_SCENARIO))
        subprocess.run(
            [binary, "run", "--config", str(config), "--out", tmp],
            check=True,
            stdout=subprocess.DEVNULL,
        )
        report = load(pathlib.Path(tmp) / "report.json")
        n = report_errors("report.json", report_validator.iter_errors(report))
        failures += n
        if n == 0:
            print("ok   generated report")

        broken = dict(report)
        broken["schema"] = "laplab-report-v0"
        if report_validator.is_valid(broken):
            print("FAIL schema accepts wrong report tag")
            failures += 1
        else:
            print("ok   rejects wrong report tag")

        broken = json.loads(json.dumps(report))
        broken["checks"][0]["verdict"] = "MAYBE"
        if report_validator.is_valid(broken):
            print("FAIL schema accepts unknown verdict")
            failures += 1
        else:
            print("ok   rejects unknown verdict")

    if failures:
        print(f"{failures} schema validation failure(s)")
        return 1
    print("all schema checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
