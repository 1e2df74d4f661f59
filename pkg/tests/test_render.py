import re
import xml.etree.ElementTree as ET

import pytest

from chacon_lab.diagonals import DiagonalD
from chacon_lab.render import figure1, figure2
from chacon_lab.tower import height

NS = "{http://www.w3.org/2000/svg}"


def test_figure1_has_one_bar_per_level(geom):
    for step in (1, 2):
        root = ET.fromstring(figure1(step, geom))
        bars = [r for r in root.iter(NS + "rect") if r.find(NS + "title") is not None]
        assert len(bars) == height(step)


def test_figure1_is_deterministic(geom):
    assert figure1(2, geom) == figure1(2, geom)
    with pytest.raises(ValueError):
        figure1(0, geom)


def test_figure2_cells():
    svg = figure2()
    root = ET.fromstring(svg)
    kinds = {r.get("data-tau"): r.get("data-kind") for r in root.iter(NS + "rect") if r.get("data-tau")}
    assert sorted(k for k, v in kinds.items() if v == "forbidden") == ["1,2", "2,1", "2,3", "3,2"]
    assert sorted(k for k, v in kinds.items() if v == "central") == ["1,1", "2,2", "3,3"]
    assert sorted(k for k, v in kinds.items() if v == "corner") == ["1,3", "3,1"]
    labels = re.findall(r">(\[\d+, \d+\])<", svg)
    assert labels.count("[0, 0]") == 3 and "[0, 17]" in labels and "[17, 0]" in labels


def test_figure2_other_example_and_dimension():
    assert "[0, 20]" in figure2(2, DiagonalD(1, (0, 3)))
    with pytest.raises(ValueError):
        figure2(3)
