import json
import shutil
from pathlib import Path

import pytest

from graphatlas.cli import main


def test_build_abstract_three_layers(tmp_path, abstract_dot_path, capsys):
    out = tmp_path / "ds"
    rc = main(["build", str(abstract_dot_path), str(out), "--qn", "80", "--qr", "180"])
    assert rc == 0
    text = capsys.readouterr().out
    assert "layer 2" in text and "layer 3" not in text
    meta = json.loads((out / "meta.json").read_text())
    assert meta["layer_count"] == 3


def test_build_missing_pos_exits_2(tmp_path, capsys):
    src = tmp_path / "missingpos.dot"
    src.write_text("graph { a; b; a -- b; }")
    rc = main(["build", str(src), str(tmp_path / "out")])
    assert rc == 2
    assert "position-incomplete" in capsys.readouterr().err


def test_build_missing_pos_with_layout_succeeds(tmp_path):
    src = tmp_path / "missingpos.dot"
    src.write_text("graph { a; b; c; a -- b; b -- c; }")
    rc = main(["build", str(src), str(tmp_path / "out"), "--layout", "--seed", "3"])
    assert rc == 0


def test_build_bad_quota_exits_1(tmp_path, abstract_dot_path, capsys):
    rc = main(["build", str(abstract_dot_path), str(tmp_path / "out"), "--qn", "6"])
    assert rc == 1
    assert "multiple of 4" in capsys.readouterr().err


def test_build_unreadable_input_exits_5(tmp_path):
    rc = main(["build", str(tmp_path / "nope.dot"), str(tmp_path / "out")])
    assert rc == 5


def test_build_syntax_error_exits_2(tmp_path, capsys):
    src = tmp_path / "bad.dot"
    src.write_text("graph { a [pos=; }")
    rc = main(["build", str(src), str(tmp_path / "out")])
    assert rc == 2
    assert "line" in capsys.readouterr().err


def test_build_layer_cap_exit_4(tmp_path, capsys):
    src = tmp_path / "g.dot"
    lines = ["graph {"]
    for i in range(8):
        lines.append(f'  n{i} [pos="{i * 5},{(i % 3) * 5}"];')
    for i in range(1, 8):
        lines.append(f"  n0 -- n{i};")
    lines.append("}")
    src.write_text("\n".join(lines))
    rc = main(["build", str(src), str(tmp_path / "out"), "--qn", "4", "--qr", "4", "--max-layers", "2"])
    assert rc == 4
    rc = main(
        [
            "build",
            str(src),
            str(tmp_path / "out2"),
            "--qn", "4", "--qr", "4", "--max-layers", "2", "--force-final-layer",
        ]
    )
    assert rc == 0


def test_double_build_byte_identical(tmp_path, abstract_dot_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        rc = main(["build", str(abstract_dot_path), str(out), "--qn", "80", "--qr", "180", "--seed", "5"])
        assert rc == 0
    rels = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    assert rels == sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    for rel in rels:
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel


def test_verify_and_stats_commands(tmp_path, abstract_dot_path, capsys):
    out = tmp_path / "ds"
    assert main(["build", str(abstract_dot_path), str(out)]) == 0
    capsys.readouterr()
    rc = main(["verify", str(out), "--samples", "500", "--json", str(tmp_path / "rep.json")])
    assert rc == 0
    assert "OK" in capsys.readouterr().out
    rep = json.loads((tmp_path / "rep.json").read_text())
    assert rep["ok"] is True
    rc = main(["stats", str(out)])
    assert rc == 0
    assert "layers: 3" in capsys.readouterr().out


def test_verify_dump_samples(tmp_path, abstract_dot_path):
    out = tmp_path / "ds"
    assert main(["build", str(abstract_dot_path), str(out)]) == 0
    dump = tmp_path / "fixtures.json"
    rc = main(["verify", str(out), "--samples", "200", "--dump-samples", str(dump), "--dump-count", "40"])
    assert rc == 0
    data = json.loads(dump.read_text())
    assert len(data) == 40
    assert {"viewport", "nodes", "rails", "rail_cover"} <= set(data[0])


def test_stats_on_missing_dataset_exits_5(tmp_path):
    assert main(["stats", str(tmp_path / "nothing")]) == 5
