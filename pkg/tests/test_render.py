import xml.etree.ElementTree as ET

from synspec.models import BP, build_ko
from synspec.render import render_svg, render_text
from synspec.sseq import chart_json, gamma_ss


def doc(page="E2"):
    return chart_json(gamma_ss(build_ko(BP, (0, 9)), (0, 6), (0, 8)), page)


def test_text_grid():
    text = render_text(doc())
    lines = text.splitlines()
    assert lines[0] == "BP chart at p=2, page E2"
    assert lines[1].startswith(" 6 |") and len(lines) == 1 + 7 + 2 + len(doc()["differentials"])
    assert "d3 from (4, 0) to (3, 3), rank 1" in text
    bottom = lines[7].split("|")[1].split()
    assert bottom[0] == "Z" and bottom[4] == "Z,o" and bottom[1] == "."


def test_svg_is_well_formed_and_deterministic():
    svg = render_svg(doc("Einf"))
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert svg == render_svg(doc("Einf"))
    squares = [e for e in root.iter() if e.tag.endswith("rect") and e.get("width") == "8"]
    assert len(squares) == 3  # Z in stems 0, 4 and 8
