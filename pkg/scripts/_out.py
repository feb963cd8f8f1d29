"""Shared output plumbing for the experiment scripts: CSV tables plus a manifest sidecar."""
import csv
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

from pcp_forge.cli import RunManifest, _jsonable


def write_table(path, rows, params: dict, seed, results: dict | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    man = RunManifest(Path(sys.argv[0]).stem, sys.argv[1:], params, seed, results=_jsonable(results or {}))
    man.started = started
    man.finished = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    Path(str(path) + ".manifest.json").write_text(json.dumps(asdict(man), indent=2, sort_keys=True) + "\n")
    print(f"wrote {path} ({len(rows)} rows)")
