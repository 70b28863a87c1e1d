import json

import pytest

from twinforge.cli import run


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_param_clause_table(capsys, examples):
    code, out, _ = call(capsys, "validate-param", examples / "cohen4.json")
    assert code == 0
    assert "(C)(b) avoidance" in out and "pass" in out
    code, out, _ = call(capsys, "validate-param", examples / "cohen4.json", "--verbatim")
    assert code == 1 and "witness" in out


def test_pr0_pentagon(capsys, examples):
    code, out, _ = call(capsys, "pr0", examples / "pentagon.json", "--n", 1, "--m", 3, "--mu", 2)
    assert code == 0 and "holds" in out


def test_iso_search(capsys, examples):
    code, out, _ = call(capsys, "iso-search", examples / "p3.json", examples / "k3.json")
    assert code == 1 and "NotFound" in out
    code, out, _ = call(capsys, "iso-search", examples / "p3.json", examples / "p3_relabeled.json")
    assert code == 0


def test_json_output_is_parseable(capsys, examples):
    code, out, _ = call(capsys, "strong-check", examples / "cohen4.json", "--format", "json")
    data = json.loads(out)
    assert code == 1 and data["holds"] is False and data["solution"]


def test_usage_and_input_errors(capsys, examples, tmp_path):
    assert call(capsys, "no-such-command")[0] == 2
    assert call(capsys, "validate-param", tmp_path / "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    assert call(capsys, "validate-param", bad)[0] == 2
    assert call(capsys, "solve-check", examples / "cohen4.json", "--G", '["zz"]')[0] == 2


def test_budget_exit_code(capsys, examples, tmp_path, monkeypatch):
    cyc = tmp_path / "c6.json"
    cyc.write_text(json.dumps({"graph": {"n": 6, "edges": [[i, (i + 1) % 6] for i in range(6)]}}))
    tri = tmp_path / "t6.json"
    tri.write_text(json.dumps({"graph": {"n": 6, "edges": [[0, 1], [1, 2], [0, 2], [3, 4], [4, 5], [3, 5]]}}))
    assert call(capsys, "iso-search", cyc, tri, "--budget", 5)[0] == 3
    monkeypatch.setenv("TWINFORGE_BUDGET", "5")
    assert call(capsys, "iso-search", cyc, tri)[0] == 3
    monkeypatch.delenv("TWINFORGE_BUDGET")
    assert call(capsys, "iso-search", cyc, tri)[0] == 1


def test_block_pipeline_commands(capsys, examples, tmp_path):
    blk = tmp_path / "blk.json"
    assert call(capsys, "build-block", examples / "vshape.json", "--D", 1, "--L", 2, "--out", blk)[0] == 0
    for cmd in ("check-k0", "check-k1", "check-k2"):
        assert call(capsys, cmd, blk, "--param", examples / "vshape.json")[0] == 0
    assert call(capsys, "generic-map", blk, "--param", examples / "vshape.json", "--down", "a")[0] == 0
    code, out, _ = call(capsys, "orbit", blk, "--param", examples / "vshape.json",
                        "--word", '[["a", 1]]', "--start", 0, "--format", "json")
    assert code == 0 and len(json.loads(out)["orbit"]) == 2


def test_parameter_commands(capsys, examples, tmp_path):
    assert call(capsys, "solve-check", examples / "cohen4.json", "--G", '["", "0", "00", "000"]')[0] == 0
    code, out, _ = call(capsys, "solve-check", examples / "cohen4.json", "--G", '["", "0", "00"]')
    assert code == 1 and "missed_members: [2]" in out
    out = tmp_path / "derived.json"
    assert call(capsys, "derive-forcing", examples / "forcing_cohen3.json", "--out", out)[0] == 0
    assert call(capsys, "validate-param", out)[0] in (0, 1)
    assert call(capsys, "wellfound-transform", examples / "vshape.json", "--r", "r")[0] == 0


def test_logic_commands(capsys, examples):
    assert call(capsys, "ef-game", examples / "p3_count.json", examples / "k3_count.json", "--moves", 1)[0] == 1
    assert call(capsys, "ef-game", examples / "p3_count.json", examples / "p3_count.json", "--moves", 2)[0] == 0
    assert call(capsys, "ef-game", examples / "p3_count.json", examples / "k3_count.json",
                "--clock-chain", 0)[0] == 0
    assert call(capsys, "far", examples / "k3.json", examples / "p3.json", "--phi", "(R x0 x1)",
                "--witness", "[0, 1, 2]")[0] in (0, 1)
    assert call(capsys, "far", examples / "p3.json", examples / "p3.json", "--phi", "(R x0 x1)",
                "--witness", "[0, 1, 2]")[0] == 1


def test_entangle_commands(capsys, examples):
    assert call(capsys, "entangled", examples / "path4.json", "--tuples", "[0, 1, 2, 3]")[0] == 0
    assert call(capsys, "entangled", examples / "k3.json", "--tuples", "[0, 1, 2]")[0] == 1
    assert call(capsys, "unembed", examples / "ordered_edge.json", examples / "single.json")[0] == 0
    assert call(capsys, "unembed", examples / "ordered_edge.json", examples / "ordered_edge.json")[0] == 1


def test_assembly_commands_write_figures(capsys, examples, tmp_path):
    fig = tmp_path / "asm.png"
    out = tmp_path / "asm.json"
    assert call(capsys, "assemble", examples / "assembly_v2.json", "--out", out, "--figure", fig)[0] == 0
    assert fig.stat().st_size > 0 and json.loads(out.read_text())["lambda"] == 2
    fig2 = tmp_path / "twin.png"
    code, text, _ = call(capsys, "verify-twin", examples / "assembly_v3.json", "--jobs", 2, "--figure", fig2)
    assert code == 0 and "(j) uniform block orders" in text
    assert fig2.exists() and (tmp_path / "twin_report.png").exists()


def test_random_coloring_is_seeded(capsys, examples):
    a = call(capsys, "assemble", examples / "assembly_v3.json", "--random-coloring", "--seed", 7, "--format", "json")
    b = call(capsys, "assemble", examples / "assembly_v3.json", "--random-coloring", "--seed", 7, "--format", "json")
    assert a == b


def test_other_figures(capsys, examples, tmp_path):
    for argv in (("validate-param", examples / "cohen4.json"),
                 ("wellfound-transform", examples / "vshape.json", "--r", "r"),
                 ("ef-game", examples / "p3_count.json", examples / "k3_count.json", "--moves", 2)):
        fig = tmp_path / f"{argv[0]}.png"
        call(capsys, *argv, "--figure", fig)
        assert fig.stat().st_size > 0
