#!/usr/bin/env python3
"""Regenerate the golden files and the docs registries from the source of truth.

Run after an intentional change to the eigen solver output format, the
identity manifest, or the model registry; commit the diffs deliberately.
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from deltoid_lab.cli import main as cli_main
from deltoid_lab.models import MODEL_REGISTRY
from deltoid_lab.verify import IDENTITY_MANIFEST


def main() -> int:
    golden = ROOT / "tests" / "golden" / "eigen_degree4_lambda_7_3.json"
    cli_main(["eigen", "--lambda", "7/3", "--degree-max", "4", "--out", str(golden)])
    print(f"wrote {golden}")

    identities = ROOT / "docs" / "identities.json"
    with open(identities, "w") as fh:
        json.dump(
            {
                "description": "Registry of every identity certified by the verify "
                "suite; anchors name the mathematical fact being checked.",
                "identities": [{"name": n, "anchor": a} for n, a in IDENTITY_MANIFEST],
            },
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")
    print(f"wrote {identities}")

    models = ROOT / "docs" / "models.json"
    with open(models, "w") as fh:
        json.dump({"models": MODEL_REGISTRY}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {models}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
