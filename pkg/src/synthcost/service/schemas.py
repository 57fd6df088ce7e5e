"""Generate the JSON Schema files shipped under docs/schemas.

Run as ``python -m synthcost.service.schemas [outdir]``; the test suite
regenerates them in memory and fails on drift.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from .models import RESPONSE_MODELS


def schema_for(name: str) -> dict:
    model = RESPONSE_MODELS[name]
    schema = model.model_json_schema(by_alias=True)
    schema["$schema"] = "https://json-schema.org/draft/2020-12/schema"
    return schema


def render(name: str) -> str:
    return json.dumps(schema_for(name), indent=2, sort_keys=True) + "\n"


def write_schemas(outdir: Path) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in RESPONSE_MODELS:
        path = outdir / f"{name}.schema.json"
        path.write_text(render(name))
        written.append(path)
    return written


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("docs/schemas")
    for p in write_schemas(target):
        print(p)
