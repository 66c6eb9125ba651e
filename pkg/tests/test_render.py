import logging
import re

import pytest

from locc_lab.families import StateSet, gen_theorem1
from locc_lab.render import (RenderError, classify, figure_spec, render_ascii, render_svg,
                             svg_cell_count)


def _cells(svg, k):
    block = re.search(r'<g class="slice" data-k="%d">(.*?)</g>' % k, svg, re.S).group(1)
    return re.findall(r'<rect class="cell ([a-z-]+)" data-state="([^"]+)"', block)


def test_example1_slices_and_pair(example1):
    spec = figure_spec(example1)
    svg = render_svg(spec)
    assert svg.count('<g class="slice"') == 6
    assert svg.count('<rect class="grid"') == 6 * 36
    pair = [c for c in spec.slice(3) if c.label in ("psi_7", "psi_8")]
    assert {c.ijk for c in pair} == {(2, 2, 3), (3, 2, 3)}
    assert {c.kind for c in pair} == {"pm-pair"}
    assert ("pm-pair", "psi_7") in _cells(svg, 3)


def test_cell_count_matches_footprints(example1, example2):
    for states in (example1, example2):
        spec = figure_spec(states)
        svg = render_svg(spec)
        assert svg_cell_count(svg) == sum(spec.footprints.values()) == spec.n_cells
        assert 'data-cells="%d"' % spec.n_cells in svg
    assert figure_spec(example1).n_cells == 72


def test_classes(example1):
    kinds = classify(example1)
    assert kinds["psi_1"] == "plus"
    assert kinds["psi_7"] == kinds["psi_8"] == "pm-pair"


def test_example2_plain_cells(example2):
    spec = figure_spec(example2)
    plain = {c.label for c in spec.slice(2) if c.kind == "basis"}
    assert {"phi_25", "phi_26", "phi_27"} <= plain
    assert {c.ijk for c in spec.cells if c.label == "phi_25"} == {(1, 2, 2)}


def test_ascii(example1):
    text = render_ascii(figure_spec(example1))
    assert text.count("k=") == 6
    grid_chars = set("".join(line[3:] for line in text.splitlines() if re.match(r"^ ?\d+ ", line)))
    assert grid_chars <= set("#o. ")
    assert "#" in text and "o" in text


def test_oversize_rejected():
    with pytest.raises(RenderError):
        figure_spec(gen_theorem1(9))


def test_empty_set_blank(caplog):
    with caplog.at_level(logging.WARNING):
        spec = figure_spec(StateSet((2, 2, 2), []))
    assert "empty" in caplog.text
    svg = render_svg(spec)
    assert svg_cell_count(svg) == 0 and svg.count('<rect class="grid"') == 8
    assert set(render_ascii(spec)) <= set("k=0123456789 \n")


def test_deterministic(example2):
    assert render_svg(figure_spec(example2)) == render_svg(figure_spec(example2))
