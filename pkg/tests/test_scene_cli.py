import json

import pytest

from motsheaf.cli import main, verify
from motsheaf.runner import ResultCache, Session, UnknownSuite, run
from motsheaf.scene import ParseError, RingMismatch, UnresolvedReference, parse_scene, parse_text, shipped_scenes

SCENES = shipped_scenes()


def test_empty_scene():
    s = parse_text("")
    assert s.commands == [] and s.complexes == {}


def test_comments_and_blank_lines_ignored():
    s = parse_text("# nothing\n\nring Q   # rational\n")
    assert s.ring == "Q" and s.ring_declared


def test_undefined_map_reported_with_line():
    text = "complex A facets a,b\npair p nomap degree 0\npair q other degree 1\n"
    with pytest.raises(UnresolvedReference) as info:
        parse_text(text)
    assert [ln for ln, _ in info.value.diagnostics] == [2, 3]


def test_bad_declaration_is_parse_error():
    with pytest.raises(ParseError):
        parse_text("complex A facets a,b\nfrobnicate A\n")


def test_conflicting_rings():
    with pytest.raises(RingMismatch):
        parse_text("ring Z\nring Q\n")


def test_torus_scene_round_trip():
    s = parse_scene(SCENES["torus"])
    summary = s.summary()
    assert (summary["complexes"], summary["products"], summary["commands"]) == (2, 1, 3)


def test_circle_scene_rank_one():
    rep = run(parse_scene(SCENES["circle"]))
    coh = rep.results[0]["data"]["degrees"]
    assert coh[1] == {"rank": 1, "torsion": []}
    push = next(r for r in rep.results if r["command"].startswith("pushforward"))
    assert push["data"]["oracle_agrees"] and push["data"]["d_squared_zero"]


def test_open_scene_rejects_with_witness():
    rep = run(parse_scene(SCENES["open"]))
    check = rep.results[0]["data"]
    assert check["rejected"] == [{"vertex": "punctured", "witness": "b"}]


def test_cache_hits_and_identical_reports(tmp_path):
    scene = parse_scene(SCENES["torus"])
    cache = ResultCache(tmp_path)
    first = run(scene, Session(scene, cache=cache)).structured()
    assert cache.hits == 0
    second = run(scene, Session(scene, cache=cache)).structured()
    assert cache.hits == len(scene.commands)
    assert first == second
    assert first == run(scene, Session(scene)).structured()


def test_verify_empty_scene_builtins():
    rep = verify(parse_text(""), "abelian-axioms")
    assert rep.results and rep.failures == 0


def test_verify_torus_kunneth():
    scene = parse_scene(SCENES["torus"])
    rep = verify(scene, "kunneth", Session(scene))
    assert rep.failures == 0
    assert any(r["data"].get("detail") == "[1, 2, 1] vs [1, 2, 1]" for r in rep.results)


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        verify(parse_text(""), "no-such-suite")


def test_cli_exit_codes(tmp_path, capsys):
    cache = ["--cache-dir", str(tmp_path)]
    assert main(["parse", str(SCENES["torus"])]) == 0
    assert main(["run", str(SCENES["torus"]), "--ring", "Z"] + cache) == 2
    bad = tmp_path / "bad.scene"
    bad.write_text("pair p nomap degree 0\n")
    assert main(["run", str(bad)] + cache) == 2
    assert main(["verify", "--suite", "nope"] + cache) == 2
    assert main(["realize", str(SCENES["open"]), "G", "punctured"] + cache) == 1
    assert main(["pushforward", str(SCENES["circle"]), "F", "circ_rel", "pt_id", "--filtration", "skel"] + cache) == 0
    capsys.readouterr()


def test_cli_structured_report_round_trip(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MOTSHEAF_CACHE_DIR", str(tmp_path / "cache"))
    assert main(["run", str(SCENES["torus"]), "--emit", "structured"]) == 0
    out = capsys.readouterr().out
    data = json.loads(out)
    assert data["failures"] == 0 and len(data["results"]) == 3
    assert any((tmp_path / "cache").rglob("*.json"))
    saved = tmp_path / "report.json"
    saved.write_text(out)
    assert main(["report", str(saved), "--emit", "structured"]) == 0
    assert capsys.readouterr().out == out


def test_timing_only_on_request(tmp_path, capsys):
    main(["run", str(SCENES["torus"]), "--no-cache", "--emit", "structured"])
    assert "seconds" not in capsys.readouterr().out
    main(["run", str(SCENES["torus"]), "--no-cache", "--emit", "structured", "--timing"])
    assert "seconds" in capsys.readouterr().out
