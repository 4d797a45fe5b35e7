import json

import pytest

from stabhom import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def records(text):
    return json.loads(text)["records"]


@pytest.mark.parametrize("n, expected", [(0, 1), (1, 0), (2, 1), (3, 2), (4, 9), (5, 44), (6, 265)])
def test_derangements(n, expected):
    assert cli.derangements(n) == expected


@pytest.mark.parametrize("text, expected", [
    (None, [-1, 0, 1]),
    ("0..2", [0, 1, 2]),
    ("3,1,1", [1, 3]),
])
def test_parse_degrees(text, expected):
    assert cli.parse_degrees(text, [-1, 0, 1]) == expected


def test_complex_injective_words_top_homology(capsys):
    code, out = run(capsys, "complex", "--cat", "fi", "--n", "4", "--kind", "k", "--homology", "--json")
    assert code == 0
    fvec, hom = records(out)
    assert fvec["computed"] == [4, 12, 24, 24]
    (result,) = hom["computed"]
    assert result["coefficient"] == "Z"
    degrees = {d["degree"]: d for d in result["degrees"]}
    assert degrees[3]["betti"] == 9
    assert all(degrees[i]["betti"] == 0 for i in range(-1, 3))


def test_module_h1ia_polydeg(capsys):
    code, out = run(capsys, "module", "--builtin", "h1ia-fi", "--polydeg", "--json")
    assert code == 0
    levels, poly = records(out)
    assert levels["computed"][:4] == ["0", "0", "Z^2", "Z^9"]
    assert poly["computed"]["degree"] <= 3


def test_complex_spb_genus_two_connectivity(capsys):
    code, out = run(capsys, "complex", "--cat", "si:zmod:2", "--genus", "2", "--kind", "spb", "--zero-conn",
                    "--json")
    assert code == 0
    fvec, conn = records(out)
    assert fvec["computed"] == [120]
    assert conn["computed"] in {"connected", "nonempty-disconnected"}


def test_pbc_complex_from_cli(capsys):
    code, out = run(capsys, "complex", "--cat", "vic:zmod:2", "--n", "2", "--kind", "pbc", "--homology",
                    "--json")
    assert code == 0
    assert records(out)[0]["computed"][0] > 0


def test_report_is_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert cli.main(["suite", "h3", "--cat", "fi", "--n-min", "2", "--n-max", "4", "--out", str(p)]) == 0
    capsys.readouterr()
    assert paths[0].read_bytes() == paths[1].read_bytes()
    doc = json.loads(paths[0].read_text())
    assert doc["schema"] == cli.SCHEMA
    assert not doc["failed"]
    assert all("runtime" not in r for r in doc["records"])


def test_timings_flag_adds_runtime(capsys):
    code, out = run(capsys, "suite", "h3", "--cat", "fi", "--n-min", "2", "--n-max", "3", "--json", "--timings")
    assert code == 0
    assert all("runtime" in r for r in records(out))


@pytest.mark.parametrize("argv", [
    ["suite", "h3", "--cat", "nonsense"],
    ["suite", "h3", "--n-min", "4", "--n-max", "2"],
    ["module", "--builtin", "no-such-module"],
    ["complex", "--cat", "vic:zmod:2", "--kind", "pb"],
    ["complex", "--cat", "vic:zmod:2", "--n", "2", "--kind", "pb", "--w", "[[1, 0, 0]]"],
])
def test_bad_input_exits_two(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


def test_failing_check_exits_one(monkeypatch, capsys):
    def broken(spec):
        return [cli.Record("always false", cli.ANCHOR_DERIVED, 0, "fail")]

    monkeypatch.setitem(cli.SUITE_RUNNERS, "join", broken)
    code, out = run(capsys, "suite", "join")
    assert code == 1
    assert "1 failed" in out


def test_cap_is_reported_as_skipped(capsys):
    code, out = run(capsys, "suite", "csd", "--builtin", "putman-sam:zmod:3", "--n-max", "4", "--json")
    recs = records(out)
    assert code == 0
    assert recs[4]["status"] == "skipped"
    assert "exceeds cap" in recs[4]["computed"]["detail"]
    assert recs[-1]["status"] == "skipped"


def test_table_summary_line(capsys):
    code, out = run(capsys, "suite", "join", "--n-max", "2")
    assert code == 0
    assert out.strip().splitlines()[-1].endswith("measured")
