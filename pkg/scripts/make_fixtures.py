"""Regenerate the shipped fixtures from the closed-form reference presentations.

Usage: python3 scripts/make_fixtures.py [OUT_DIR]
"""

import json
import sys
from pathlib import Path

from synspec import reference
from synspec.figures import FIGURES, SPHERE_FIXTURES, fixtures_dir, figure_json, reference_model
from synspec.models import BP, FP
from synspec.taumod import dumps

SPHERE_PROVENANCE = {
    FP: "Adams E2 for the sphere at 2 through stem 8 (h0, h1, h2, h3, c0 and their products); no differentials",
    BP: "Adams-Novikov E2 for the sphere at 2 through stem 8, with d3(alpha) killing eta^4 and beyond",
}


def main(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    spheres = {FP: reference.sphere_ass_p2(), BP: reference.sphere_anss_p2()}
    for theory, m in spheres.items():
        m = m.__class__(**{**m.__dict__, "notes": m.notes + (SPHERE_PROVENANCE[theory],)})
        (out / SPHERE_FIXTURES[theory]).write_text(dumps(m) + "\n", encoding="utf-8")
    for fig in FIGURES.values():
        doc = figure_json(fig, reference_model(fig))
        doc["provenance"] = {"figure": fig.title, "route": "closed-form reference presentation"}
        (out / fig.fixture_name).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n", encoding="utf-8")
        print(f"wrote {fig.fixture_name}")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else fixtures_dir())
