import json
import time
from fractions import Fraction

import pytest

from birdyn.arcs import ModelPoint
from birdyn.catalog import catalog_bd_sigma_tau, catalog_df_epsilon
from birdyn.cli import EXIT_INPUT, EXIT_OK, EXIT_VERIFY, run
from birdyn.io import (
    DefinitionError,
    definition_from_json,
    dumps_definition,
    format_model_point,
    load_definition,
    parse_model_point,
    save_definition,
)
from birdyn.lattice import P1xP1, P2

DEFS = {
    "df_1_4": lambda: catalog_df_epsilon(Fraction(1, 4)),
    "df_3_5": lambda: catalog_df_epsilon(Fraction(3, 5)),
    "bd_2_1": lambda: catalog_bd_sigma_tau(2, 1),
    "bd_half": lambda: catalog_bd_sigma_tau(Fraction(1, 2), Fraction(3, 7)),
}


@pytest.mark.parametrize("name", sorted(DEFS))
def test_definition_round_trip_is_byte_stable(name, tmp_path):
    d = DEFS[name]()
    text = dumps_definition(d)
    path = tmp_path / "map.json"
    save_definition(d, path)
    assert path.read_text(encoding="utf-8") == text
    again = load_definition(path)
    assert dumps_definition(again) == text
    assert again.mm.pullback_matrix() == d.mm.pullback_matrix()


def test_bad_definitions(tmp_path):
    with pytest.raises(DefinitionError):
        load_definition(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(DefinitionError):
        load_definition(bad)
    obj = json.loads(dumps_definition(catalog_df_epsilon(Fraction(1, 4))))
    obj["ambient"] = "P3"
    with pytest.raises(DefinitionError):
        definition_from_json(obj)


def test_model_point_strings():
    p = parse_model_point(P2, "[1:0:0]@e0<1:1>")
    assert isinstance(p, ModelPoint)
    assert format_model_point(p) == "[1:0:0]@e0<1:1>"
    q = parse_model_point(P1xP1, "0:1;2:-4")
    assert format_model_point(q) == "[0:1;1:-2]"


def _json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_cli_exit_codes(tmp_path, capsys):
    out = str(tmp_path / "o")
    assert run(["spectral", "--catalog", "df", "--param", "eps=1/4", "--out", out]) == EXIT_OK
    assert "x^5 - x^3 - x^2 - x - 1" in capsys.readouterr().out
    assert run(["verify", "--catalog", "qi", "--out", out]) == EXIT_VERIFY
    assert run(["spectral", "--catalog", "df", "--param", "eps=1/3", "--out", out]) == EXIT_INPUT
    assert run(["spectral", "--file", str(tmp_path / "nope.json"), "--out", out]) == EXIT_INPUT
    assert run(["orbit", "--catalog", "df", "--start", "not a point", "--out", out]) == EXIT_INPUT
    # reaching Ind(f) is a result, not an exhausted horizon
    assert run(["orbit", "--catalog", "df", "--start", "[0:1;4:1]", "--horizon", "5", "--out", out]) == EXIT_OK
    assert _json(tmp_path / "o" / "orbit.json")["status"] == "indeterminacy"


def test_cli_outputs(tmp_path):
    out = tmp_path / "o"
    base = ["--catalog", "df", "--out", str(out)]
    assert run(["classify", *base]) == EXIT_OK
    cls = _json(out / "classify.json")
    assert cls["classification"]["C_per"] == ["L"]
    assert run(["orbit", *base, "--start", "2:1;4:-1", "--horizon", "6"]) == EXIT_OK
    assert (out / "orbit.csv").read_text().startswith("step,point,event,naive_height")
    assert run(["height", *base, "--start", "2:1;4:-1", "--canonical", "--horizon", "10"]) == EXIT_OK
    assert (out / "height.csv").exists()
    assert run(["bdsum", *base, "--horizon", "20"]) == EXIT_OK
    assert _json(out / "bdsum.json")["reports"]
    assert run(["telescope", "--catalog", "henon", "--out", str(out), "--start", "1:2:3"]) == EXIT_OK
    assert all(c["ok"] for c in _json(out / "telescope.json")["checks"])


def test_cli_from_file(tmp_path):
    path = tmp_path / "map.json"
    save_definition(catalog_bd_sigma_tau(2, 1), path)
    assert run(["spectral", "--file", str(path), "--out", str(tmp_path / "o")]) == EXIT_OK


def test_report_deterministic_and_fast(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}"
        t = time.perf_counter()
        assert run(["report", "--all", "--seed", "11", "--out", str(out)]) == EXIT_OK
        assert time.perf_counter() - t < 60
        outs.append(out)
    for family in ("df_epsilon", "bd_sigma_tau"):
        a, b = (_json(o / family / "report.json") for o in outs)
        a.pop("elapsed_seconds")
        b.pop("elapsed_seconds")
        assert a == b
        assert a["seed"] == 11
    names = sorted(p.name for p in (outs[0] / "df_epsilon").iterdir())
    assert "report.json" in names and any(n.startswith("bd_") for n in names)
