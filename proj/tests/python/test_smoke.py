"""Smoke tests for the hbop python module built via CMake/scikit-build-core."""

import math
import os
import tempfile

import pytest

import hbop


def plus_rows(arm=9, width=3, margin=3):
    size = 2 * arm + width + 2 * margin
    lo, hi = margin + arm, margin + arm + width
    rows = []
    for y in range(size):
        row = []
        for x in range(size):
            horiz = lo <= y < hi and margin <= x < size - margin
            vert = lo <= x < hi and margin <= y < size - margin
            row.append(1 if (horiz or vert) else 0)
        rows.append(row)
    return rows


@pytest.fixture(scope="module")
def plus_bag():
    shape = hbop.make_shape(plus_rows(), id="plus", class_label="plus")
    skeleton = hbop.skeletonize(shape)
    graph = hbop.build_graph(skeleton, shape)
    tree = hbop.max_spanning_tree(graph)
    return hbop.enumerate_bag(tree, 5, 2)


def test_pipeline_structure(plus_bag):
    shape = hbop.make_shape(plus_rows(), id="plus")
    skeleton = hbop.skeletonize(shape)
    assert skeleton.pixel_count() > 0
    graph = hbop.build_graph(skeleton, shape)
    assert graph.node_count() == 5
    assert graph.edge_count() == 4
    assert graph.cycle_rank() == 0
    assert len(plus_bag) > 0


def test_bag_reversal_closure(plus_bag):
    seqs = {tuple(h.root().node_ids) for h in plus_bag.hierarchies}
    assert len(seqs) == len(plus_bag.hierarchies)
    for seq in seqs:
        assert tuple(reversed(seq)) in seqs


def test_path_kernels(plus_bag):
    cfg = hbop.PathKernelConfig(0.1, 0.1, 2)
    h = plus_bag.hierarchies[0]
    assert hbop.k_classic(h.root(), h.root(), cfg) == pytest.approx(1.0)
    assert hbop.k_edit(h, h, cfg) <= 1.0 + 1e-12
    for other in plus_bag.hierarchies:
        if other.root().length() != h.root().length():
            assert hbop.k_classic(h.root(), other.root(), cfg) == 0.0
            break


def test_invalid_shape_raises():
    with pytest.raises(hbop.HbopError):
        hbop.make_shape([[0, 0], [0, 0], [0, 0]])  # too small and empty


def test_one_class_singleton():
    model = hbop.fit_one_class([[1.0]], 0.9)
    assert model.alpha == [1.0]
    assert model.rho == pytest.approx(1.0)
    assert model.norm_w == pytest.approx(1.0)


def test_change_kernel_self_is_one(plus_bag):
    cfg = hbop.PathKernelConfig(0.1, 0.1, 2)
    profile = hbop.profile_bag(plus_bag, "edit", cfg, nu=0.9)
    d = hbop.d_change(plus_bag, profile, plus_bag, profile, "edit", cfg)
    assert d == pytest.approx(0.0, abs=1e-6)  # arccos noise near cos = 1
    k = hbop.k_change(plus_bag, profile, plus_bag, profile, "edit", cfg, 0.3)
    assert k == pytest.approx(1.0, abs=1e-8)
    assert hbop.k_max(plus_bag, plus_bag, "classic", cfg) == pytest.approx(1.0)


def test_png_mask_loading(tmp_path):
    # minimal 8-bit grayscale PNG: a dark 3x3 block on white
    import struct
    import zlib

    w = h = 7
    rows = bytearray()
    for y in range(h):
        rows.append(0)  # filter: none
        for x in range(w):
            rows.append(0 if 2 <= x < 5 and 2 <= y < 5 else 255)

    def chunk(tag, payload):
        data = tag + payload
        return struct.pack(">I", len(payload)) + data + struct.pack(
            ">I", zlib.crc32(data) & 0xFFFFFFFF)

    png = (b"\x89PNG\r\n\x1a\n" +
           chunk(b"IHDR", struct.pack(">IIBBBBB", w, h, 8, 0, 0, 0, 0)) +
           chunk(b"IDAT", zlib.compress(bytes(rows))) +
           chunk(b"IEND", b""))
    path = tmp_path / "block.png"
    path.write_bytes(png)

    try:
        shape = hbop.load_mask(str(path))
    except hbop.HbopError as err:  # PNG support not compiled in
        assert "PNG" in str(err)
        pytest.skip("library built without libpng")
    assert (shape.width, shape.height) == (w, h)
    assert shape.foreground_count() == 9  # dark pixels are the shape
    assert shape.at(3, 3)
    assert not shape.at(0, 0)


def test_good_matches():
    dist = [0.0, 0.1, 0.2, 0.3]
    ids = ["a", "b", "c", "d"]
    labels = ["x", "x", "y", "x"]
    assert hbop.good_matches(dist, ids, labels, "x") == 2


def test_graph_json_roundtrip(plus_bag):
    shape = hbop.make_shape(plus_rows(), id="plus", class_label="demo")
    graph = hbop.build_graph(hbop.skeletonize(shape), shape)
    text = graph.to_json()
    back = hbop.SkeletalGraph.from_json(text)
    assert back.node_count() == graph.node_count()
    assert back.edge_count() == graph.edge_count()
    assert back.principal_axis == pytest.approx(graph.principal_axis)


def test_end_to_end_gram(tmp_path):
    cfg = hbop.HarnessConfig()
    cfg.s = 4
    cfg.classes = ["plus", "bars"]
    manifest = tmp_path / "m.csv"
    lines = []
    for i, arm in enumerate((8, 9, 10)):
        shape = hbop.make_shape(plus_rows(arm=arm), id=f"p{i}", class_label="plus")
        hbop.save_pbm(shape, str(tmp_path / f"p{i}.pbm"))
        lines.append(f"p{i},p{i}.pbm,plus")
    for i, arm in enumerate((12, 14, 16)):
        rows = [[1 if 3 <= y < 10 and 3 <= x < 3 + arm else 0 for x in range(arm + 6)]
                for y in range(13)]
        shape = hbop.make_shape(rows, id=f"b{i}", class_label="bars")
        hbop.save_pbm(shape, str(tmp_path / f"b{i}.pbm"))
        lines.append(f"b{i},b{i}.pbm,bars")
    manifest.write_text("\n".join(lines) + "\n")

    gram = hbop.compute_gram(str(manifest), "new", cfg)
    assert gram["failed"] == []
    assert len(gram["ids"]) == 6
    for i in range(6):
        assert gram["values"][i][i] == pytest.approx(1.0)
    assert gram["min_eigenvalue"] >= -1e-8

    report = hbop.run_retrieval(str(manifest), "new", cfg)
    means = report["class_means"]
    assert set(means) == {"plus", "bars"}
    for mean in means.values():
        assert 1.0 <= mean <= 3.0
