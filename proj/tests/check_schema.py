"""Validate CLI JSON reports against the committed schemas."""
import json
import subprocess
import sys

import jsonschema


def run(bpre, *args):
    out = subprocess.run([bpre, *args], check=False, capture_output=True, text=True)
    if out.returncode not in (0, 1):
        sys.exit(f"{args}: exit {out.returncode}\n{out.stderr}")
    return json.loads(out.stdout)


def main():
    bpre, schema_dir = sys.argv[1], sys.argv[2]
    with open(f"{schema_dir}/ensemble_report.schema.json") as f:
        ensemble_schema = json.load(f)
    with open(f"{schema_dir}/validate_report.schema.json") as f:
        validate_schema = json.load(f)
    reports = [
        run(bpre, "ensemble", "--n", "400", "--replicates", "60"),
        run(bpre, "ensemble", "--n", "300", "--replicates", "40", "--times", "0.5", "--timing"),
        run(bpre, "ensemble", "--n", "60", "--replicates", "500", "--mode", "rejection",
            "--times", "0.5"),
        run(bpre, "ensemble", "--n", "20", "--replicates", "5", "--times", "0.5,0.75"),
    ]
    for doc in reports:
        jsonschema.validate(doc, ensemble_schema)
    # Schema must reject a report carrying the thread count.
    bad = dict(reports[0])
    bad["config"] = dict(bad["config"], threads=4)
    try:
        jsonschema.validate(bad, ensemble_schema)
        sys.exit("schema accepted a config echo with threads")
    except jsonschema.ValidationError:
        pass
    sample = {
        "schema": "bpre-validate-report", "version": 1, "seed": 1, "passed": True,
        "checks": [{"name": "x", "description": "d", "statistic": 0.1, "threshold": 1.0,
                    "relation": "<=", "passed": True, "detail": ""}],
    }
    jsonschema.validate(sample, validate_schema)
    print(f"{len(reports)} ensemble reports valid")


if __name__ == "__main__":
    main()
