import json
from fractions import Fraction

import pytest

from kequiv import pairfile
from kequiv.cli import main
from kequiv.corpus import atiyah, flip_rs, francia, quot_n_r
from kequiv.errors import KequivError
from kequiv.toric import Fan, ToricPair

C2 = Fan.from_rays([(1, 0), (0, 1)], [(0, 1)])


def _run(capsys, *argv):
    capsys.readouterr()
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def _examples(tmp_path, name, **params):
    out = tmp_path / name
    argv = ["examples", name, "--out", str(out)]
    for k, v in params.items():
        argv += [f"--{k}", str(v)]
    assert main(argv) == 0
    return out / "X.json", out / "Y.json"


# -- PairFile ---------------------------------------------------------------


@pytest.mark.parametrize("pair", [atiyah()[0], flip_rs(2, 1)[1], quot_n_r(3, 2)[0], francia()[1]])
def test_pairfile_round_trip(pair):
    text = pairfile.dumps(pair)
    back = pairfile.loads(text)
    assert back == pair
    assert pairfile.dumps(back) == text


def test_pairfile_canonicalizes():
    messy = '{"rays": [[1,0],[ 0, 1]], "label": "c", "cones": [[0,1]], "rank": 2, "boundary": {"0": " 2/4 "}}'
    once = pairfile.dumps(pairfile.loads(messy))
    assert pairfile.dumps(pairfile.loads(once)) == once
    assert '"0": "1/2"' in once
    assert pairfile.loads(once).coefficients == {0: Fraction(1, 2)}


def test_pairfile_layout():
    text = pairfile.dumps(ToricPair(C2, {1: Fraction(-1)}, "C2"))
    assert text == (
        "{\n"
        '  "boundary": {\n    "1": "-1"\n  },\n'
        '  "cones": [\n    [0, 1]\n  ],\n'
        '  "label": "C2",\n'
        '  "rank": 2,\n'
        '  "rays": [\n    [1, 0],\n    [0, 1]\n  ]\n'
        "}\n"
    )


@pytest.mark.parametrize(
    "text, match",
    [
        ('{"rank": 1, "rays": [[1]], "cones": [[0]], "boundary": {"0": 0.5}}', "float"),
        ('{"rank": 1, "rays": [[1.0]], "cones": [[0]]}', "float"),
        ('{"rank": 1, "rays": [[1]]}', "missing"),
        ('{"rank": 1, "rays": [[1]], "cones": [[0]], "boundary": {"x": "1/2"}}', "ray index"),
        ('{"rank": 1, "rays": [[1]], "cones": [[0]], "boundary": {"0": "a/b"}}', "cannot parse"),
        ("[1, 2", "invalid JSON"),
    ],
)
def test_pairfile_rejects(text, match):
    with pytest.raises(KequivError, match=match):
        pairfile.loads(text)


# -- commands -----------------------------------------------------------------


def test_examples_regenerate_byte_identical(tmp_path, capsys):
    for name, params in [("francia", {}), ("atiyah", {}), ("flip-r-s", {"r": 2, "s": 1}), ("quot-n-r", {"n": 3, "r": 2})]:
        first = [p.read_bytes() for p in _examples(tmp_path / "a", name, **params)]
        second = [p.read_bytes() for p in _examples(tmp_path / "b", name, **params)]
        assert first == second
    capsys.readouterr()


def test_examples_stdout(capsys):
    code, out, _ = _run(capsys, "examples", "atiyah")
    assert code == 0
    data = json.loads(out)
    assert pairfile.from_dict(data["X"]) == atiyah()[0]


@pytest.mark.parametrize("n, r, code", [(3, 2, 10), (2, 2, 0), (2, 3, 11)])
def test_compare_quotient_family(tmp_path, capsys, n, r, code):
    x, y = _examples(tmp_path, "quot-n-r", n=n, r=r)
    got, out, _ = _run(capsys, "compare", x, y, "--json")
    assert got == code
    data = json.loads(out)
    diffs = {d["difference"] for d in data["differences"] if d["difference"] != "0"}
    expected = Fraction(n - r, r)
    assert diffs == (set() if n == r else {str(expected)})


def test_compare_francia_equivalent(tmp_path, capsys):
    x, y = _examples(tmp_path, "francia")
    code, out, _ = _run(capsys, "compare", x, y)
    assert code == 0 and out.startswith("verdict: EQUIVALENT")


def test_compare_incomparable(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    pairfile.dump(ToricPair(C2, {0: Fraction(1, 2)}), a)
    pairfile.dump(ToricPair(C2, {1: Fraction(1, 2)}), b)
    assert _run(capsys, "compare", a, b)[0] == 12


def test_stringy_unchanged_by_blowup(tmp_path, capsys):
    pair = tmp_path / "p.json"
    blown = tmp_path / "q.json"
    pairfile.dump(ToricPair(C2, {0: Fraction(1, 3), 1: Fraction(-1, 2)}), pair)
    assert main(["blowup", str(pair), "--center", "0,1", "--out", str(blown)]) == 0
    _, before, _ = _run(capsys, "stringy", pair)
    _, after, _ = _run(capsys, "stringy", blown)
    assert before == after and before.strip()


def test_check(tmp_path, capsys):
    path = tmp_path / "a1.json"
    pairfile.dump(ToricPair(Fan.from_rays([(1, 0), (1, 2)], [(0, 1)])), path)
    code, out, _ = _run(capsys, "check", path, "--json")
    data = json.loads(out)
    assert code == 0
    assert (data["valid"], data["smooth"], data["klt"], data["terminal"]) == (True, False, True, False)
    bad = tmp_path / "bad.json"
    bad.write_text('{"rank": 2, "rays": [[1, 0], [2, 0]], "cones": [[0, 1]]}')
    code, out, _ = _run(capsys, "check", bad)
    assert code == 1 and out.startswith("valid: no")


def test_resolve_and_rank(tmp_path, capsys):
    path = tmp_path / "a2.json"
    smooth = tmp_path / "s.json"
    pairfile.dump(ToricPair(Fan.from_rays([(1, 0), (1, 3)], [(0, 1)])), path)
    assert main(["resolve", str(path), "--out", str(smooth)]) == 0
    assert _run(capsys, "rank", path)[1].strip() == "3"
    code, out, _ = _run(capsys, "check", smooth, "--json")
    assert json.loads(out)["smooth"]


def test_wall_flip_and_sod(tmp_path, capsys):
    x, _ = _examples(tmp_path, "flip-r-s", r=2, s=1)
    code, out, _ = _run(capsys, "wall", x, "--wall", "1,3,4", "--json")
    report = json.loads(out)
    assert code == 0 and report["classification"] == "FLIPPING" and report["k_sign"] == "K_NEGATIVE"
    flipped = tmp_path / "flipped.json"
    assert main(["flip", str(x), "--wall", "1,3,4", "--out", str(flipped)]) == 0
    assert _run(capsys, "compare", x, flipped)[0] == 10
    code, out, _ = _run(capsys, "sod", "flip", x, flipped, "--wall", "1,3,4", "--json")
    data = json.loads(out)
    assert code == 0 and data["case"] == "A" and len(data["pieces"]) == 1


def test_sod_divisorial_text(tmp_path, capsys):
    x, y = _examples(tmp_path, "quot-n-r", n=3, r=2)
    code, out, _ = _run(capsys, "sod", "divisorial", x, y)
    assert code == 0
    assert out.splitlines()[1] == "ranks: 3 = 2 + 1"


def test_sod_fiber(tmp_path, capsys):
    path = tmp_path / "p1.json"
    pairfile.dump(ToricPair(Fan.from_rays([(1,), (-1,)], [(0,), (1,)])), path)
    code, out, _ = _run(capsys, "sod", "fiber", path, "--projection", "", "--json")
    assert code == 0 and json.loads(out)["rank_equation"] == {"host": 2, "embedded": 1, "pieces": [1]}


def test_mckay(capsys):
    code, out, _ = _run(capsys, "mckay", "--dim", 3, "--order", 3, "--weights", "1,1,1", "--json")
    data = json.loads(out)
    assert code == 0
    assert data["order"] == 3 and data["junior_count"] == 1 and len(data["crepant_rays"]) == 1
    code, _, err = _run(capsys, "mckay", "--dim", 2, "--order", 2)
    assert code == 2 and json.loads(err)["error"] == "bad_argument"


def test_errors_are_json(tmp_path, capsys):
    code, out, err = _run(capsys, "rank", tmp_path / "missing.json")
    assert code == 2 and out == ""
    assert json.loads(err)["error"] == "io_error"
    path = tmp_path / "x.json"
    pairfile.dump(atiyah()[0], path)
    code, _, err = _run(capsys, "wall", path, "--wall", "0")
    assert code == 2 and "error" in json.loads(err)
    code, _, err = _run(capsys, "sod", "coeff", path)
    assert code == 2 and json.loads(err)["error"] == "bad_argument"


def test_exit_code_depends_only_on_verdict(tmp_path, capsys):
    codes = set()
    for n, r in [(3, 2), (4, 2), (5, 3)]:
        x, y = _examples(tmp_path / f"{n}{r}", "quot-n-r", n=n, r=r)
        codes.add(_run(capsys, "compare", x, y)[0])
    assert codes == {10}
