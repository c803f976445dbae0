import re
import xml.etree.ElementTree as ET
from fractions import Fraction
from pathlib import Path

import pytest

from ufpmaze.construct import construct_thin_pair
from ufpmaze.model import Instance, Task
from ufpmaze.render import RenderSpec, render

GOLDEN = Path(__file__).parent / "golden"
NS = "{http://www.w3.org/2000/svg}"


def test_ascii_golden(i1):
    assert render(i1) == (GOLDEN / "i1_ascii.txt").read_text()


def test_ascii_four_plateau_runs(i1):
    rows = [line.split("|", 1)[1] for line in render(i1).splitlines() if "|" in line]
    heights = []
    for e in range(4):
        col = [r[e * 4:e * 4 + 4] if len(r) > e * 4 else "" for r in rows]
        heights.append(sum(1 for c in col if c == "####"))
    assert heights == [7, 10, 8, 3]


def test_ascii_draws_tasks(i1):
    out = render(i1, [1, 2, 3], RenderSpec(height=6))
    assert out.count("-") > 20
    assert out == render(i1, [3, 2, 1], RenderSpec(height=6))


def test_svg_curve_only(i1):
    root = ET.fromstring(render(i1, None, RenderSpec("svg")))
    paths = root.findall(f"{NS}path")
    assert len(paths) == 1 and paths[0].get("d").endswith("Z")
    assert not root.findall(f"{NS}line")
    nums = [float(x) for x in re.findall(r"-?\d+(?:\.\d+)?", paths[0].get("d"))]
    ys = nums[1::2]
    assert ys[0] == ys[-1]  # starts and ends on the base line


def test_svg_with_constructed_pair(i1):
    c = construct_thin_pair(i1, i1.ids, 4, Fraction(1, 2))
    root = ET.fromstring(render(i1, c.pair, RenderSpec("svg")))
    tasks = root.findall(f"{NS}line[@class='task']")
    mts = root.findall(f"{NS}line[@class='mtask']")
    assert len(tasks) == len(c.pair.tasks) and len(mts) == len(c.pair.mtasks)
    for line in tasks:
        t = i1.task(int(line.get("data-task")))
        assert (int(line.get("data-s")), int(line.get("data-t"))) == (t.s, t.t)
        assert Fraction(line.get("data-b")) == i1.bneck(t.id).b
        assert line.get("stroke-dasharray")
    for line in mts:
        assert float(line.get("stroke-width")) > 2


def test_same_level_segments_do_not_overlap_on_screen():
    inst = Instance((Fraction(4), Fraction(4)), (Task(1, 1, 2, Fraction(2), Fraction(1)),
                                                 Task(2, 2, 3, Fraction(2), Fraction(1)),
                                                 Task(3, 1, 3, Fraction(2), Fraction(1))))
    root = ET.fromstring(render(inst, [1, 2, 3], RenderSpec("svg")))
    ys = [line.get("y1") for line in root.findall(f"{NS}line")]
    assert len(set(ys)) == 3


def test_show_filter_and_validation(i1):
    out = render(i1, [1], RenderSpec("svg", frozenset({"task-segments"})))
    assert "<path" not in out and "data-task" in out
    with pytest.raises(ValueError):
        RenderSpec("png")
    with pytest.raises(ValueError):
        RenderSpec("svg", frozenset({"everything"}))


def test_dp_cell_area(i1):
    out = render(i1, None, RenderSpec("svg", frozenset({"dp-cell-area"})), cell_area=(1, 2, 0, 4))
    assert 'class="dp-cell"' in out
