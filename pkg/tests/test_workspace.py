import json
import os

import pytest

from efq.errors import InputError
from efq.structures import Assignment
from efq.workspace import Workspace, parse_bindings

from conftest import DATA


def test_parse_bindings():
    assert parse_bindings("x=0, y=12") == {"x": 0, "y": 12}
    assert parse_bindings("") == {}
    for bad in ("x", "x=a", "1x=0"):
        with pytest.raises(InputError):
            parse_bindings(bad)


def test_load_example_workspaces():
    ws = Workspace.load(os.path.join(DATA, "colour_models.json"))
    assert sorted(ws.structures) == ["A", "B1", "B2"] and ws.qset.names() == ["exactly=3"]
    ws2 = Workspace.load(os.path.join(DATA, "marked_models.json"))
    assert ws2.structure("B").size == 1


def test_context_references(tmp_path):
    obj = {"vocabulary": {"P": 1}, "structures": {"S": {"domain": 3, "relations": {"P": [[1]]}}},
           "assignments": {"f": {"x": 2}}, "quantifiers": ["exists"], "caps": {"max_domain": 3}}
    ws = Workspace.from_json(obj)
    assert ws.context("S").assignment == Assignment()
    assert ws.context("S:f").assignment.as_dict() == {"x": 2}
    assert ws.context("S{x=1,y=0}").assignment.as_dict() == {"x": 1, "y": 0}
    assert ws.context("S", {"z": 0}).assignment.as_dict() == {"z": 0}
    assert [c.assignment.as_dict() for c in ws.contexts("S{x=0,y=1}, S:f")] == [{"x": 0, "y": 1}, {"x": 2}]
    assert ws.caps.max_domain == 3
    for bad in ("T", "S:g", "S{x=9}", "S{x}", "S x"):
        with pytest.raises(InputError):
            ws.context(bad)


def test_round_trip(tmp_path):
    ws = Workspace.load(os.path.join(DATA, "colour_models.json"))
    path = tmp_path / "ws.json"
    ws.dump(path)
    again = Workspace.load(path)
    assert again.to_json() == ws.to_json()
    assert json.loads(path.read_text())["quantifiers"] == ["exactly=3"]


def test_load_errors(tmp_path):
    with pytest.raises(InputError):
        Workspace.load(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError):
        Workspace.load(bad)
    with pytest.raises(InputError):
        Workspace.from_json({"vocabulary": {"P": 1}, "structures": {}, "caps": {"bogus": 1}})
