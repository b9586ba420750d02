import pytest

from ip_trees import CodecError, FadMeasure1D, Hierarchy, L1Point, build_model, derive_hierarchy
from ip_trees.ipt_build import Model
from ip_trees.ipt_codec import (
    dump_fad,
    dump_hierarchy,
    dump_point,
    dump_samples,
    dump_tree,
    dumps,
    load_fad,
    load_hierarchy,
    load_point,
    load_samples,
    load_tree,
    loads,
    read_json,
    write_json,
)


def test_tree_documents_load_back_to_the_same_tree(tmp_path):
    tree = build_model(Model.fat_cantor(2), 4, seed=3)
    path = tmp_path / "tree.json"
    write_json(path, dump_tree(tree))
    loaded = load_tree(read_json(path))
    assert loaded == tree
    assert dumps(dump_tree(loaded)) == path.read_text(encoding="utf-8")


def test_tree_document_layout():
    doc = dump_tree(build_model(Model.custom([FadMeasure1D.lebesgue()]), 1, seed=0))
    assert doc["arcs"] == [[[], [[1, 1.0]], 1]]
    assert doc["weight"] == {"atoms": [], "density": [[[], [[1, 1.0]], 1, 1.0]]}
    [step] = doc["build_log"]
    assert step["site"] == []
    assert step["string"] == {"atoms": [], "segments": [[0.0, 1.0]]}
    assert step["paused"] is False


def test_hierarchy_and_samples_documents():
    tree = build_model(Model.brownian(), 3, seed=1, truncation=12)
    h, samples = derive_hierarchy(tree, 6, seed=2)
    doc = loads(dumps({"hierarchy": dump_hierarchy(h), "samples": dump_samples(samples)}))
    assert load_hierarchy(doc["hierarchy"]) == h
    assert load_samples(doc["samples"]) == samples
    nested = dump_hierarchy(Hierarchy.build([1, 2, 3], [{1, 2}]))
    assert nested == {"labels": [1, 2, 3], "blocks": [[1, 2, 3], [[[1, 2], [[[1], []], [[2], []]]], [[3], []]]]}


def test_small_documents():
    point = L1Point(((2, 0.5), (4, 0.25)))
    assert dump_point(point) == [[2, 0.5], [4, 0.25]]
    assert load_point([[2, 0.5], [4, 0.25]]) == point
    q = FadMeasure1D.build([(0.0, 0.5)], [(0.5, 1.0)])
    assert load_fad(dump_fad(q)) == q


def test_malformed_documents_name_the_offending_entry():
    with pytest.raises(CodecError) as excinfo:
        load_point([[0, 1.0]])
    assert "point" in str(excinfo.value)
    with pytest.raises(CodecError) as excinfo:
        load_point([[1, "far"]])
    assert "expected a number" in str(excinfo.value)
    with pytest.raises(CodecError) as excinfo:
        load_tree({"arcs": []})
    assert "missing key(s): weight" in str(excinfo.value)
    with pytest.raises(CodecError) as excinfo:
        load_tree({"arcs": [[[], [[1, 0.5]], 2]], "weight": {"atoms": [], "density": []}})
    assert "tree.arcs[0]" in str(excinfo.value)
    with pytest.raises(CodecError) as excinfo:
        load_hierarchy({"labels": [1, 2, 3], "blocks": [[1, 2, 3], [[[1, 2], []], [[2, 3], []]]]})
    assert "overlaps" in str(excinfo.value)
    with pytest.raises(CodecError) as excinfo:
        loads("{")
    assert "invalid JSON" in str(excinfo.value)


def test_read_json_rejects_bytes_that_are_not_utf8(tmp_path):
    path = tmp_path / "garbled.json"
    path.write_bytes(b"\xff\xfe{}")
    with pytest.raises(CodecError) as excinfo:
        read_json(path)
    assert "not UTF-8" in str(excinfo.value)
    assert str(path) in str(excinfo.value)
