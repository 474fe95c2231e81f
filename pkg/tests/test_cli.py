import io
import json
import subprocess
import sys

import pytest

from kirchlip.cech import mod15_cover
from kirchlip.cli import (
    EXIT_CODES,
    INPUT_ERROR,
    OK,
    PROPERTY_FAILS,
    RESOURCE_ERROR,
    function_from_json,
    function_to_json,
    main,
    run_command,
    to_jsonable,
)
from kirchlip.errors import InputError
from kirchlip.kirch import Progression, set_to_json
from kirchlip.lipcalc import WindowFunction


def run(argv, doc=None):
    stdin = io.StringIO(doc if isinstance(doc, str) else json.dumps(doc)) if doc is not None else None
    res = run_command(argv, stdin)
    return res.status, json.loads(json.dumps(to_jsonable(res.payload)))


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def table(values, domain=None, window=None):
    doc = {"repr": "table", "values": [[x, y] for x, y in values.items()]}
    if domain is not None:
        doc["domain"] = set_to_json(domain)
    if window is not None:
        doc["window"] = window
    return doc


def test_exit_code_table():
    assert EXIT_CODES == {OK: 0, PROPERTY_FAILS: 1, INPUT_ERROR: 2, RESOURCE_ERROR: 3}


def test_closure():
    status, out = run(["closure", "1", "7", "11"])
    assert status == OK
    assert out == {"kind": "progression", "a": "1", "d": "2"}


def test_intersect_list_and_dict_forms():
    sets = [set_to_json(Progression(1, 2)), set_to_json(Progression(2, 3))]
    for doc in (sets, {"sets": sets}):
        status, out = run(["intersect", "-"], doc)
        assert status == OK and out["intersection"] == {"kind": "progression", "a": "5", "d": "6"}


def test_classify_star_and_failed_nest():
    cover = {"pieces": [set_to_json(Progression(a, d)) for a, d in ((1, 2), (1, 3), (1, 5))]}
    status, out = run(["classify", "-"], cover)
    assert status == OK and out["star_like"] is True
    bad = {"pieces": [set_to_json(Progression(a, d)) for a, d in ((1, 3), (2, 3), (1, 2))]}
    status, out = run(["classify", "-", "--straw", "0,1", "--core", "2"], bad)
    assert status == PROPERTY_FAILS and out["nest"] is False


def test_interp_with_header():
    status, out = run(["interp", "-"], "x,y\n1,0\n2,1\n4,0\n")
    assert status == OK
    assert out["coeffs"] == ["-2", "5/2", "-1/2"]
    assert out["leading_divided_difference"] == "-1/2" and out["integral"] is False


def test_circuit_found_and_absent():
    status, out = run(["circuit", "-"], table({2: 1, 4: 0}))
    assert status == PROPERTY_FAILS
    assert out["circuit"] == ["2", "4"] and out["leading"] == "-1/2" and out["denominator"] == "2"
    status, out = run(["circuit", "-"], table({1: 1, 2: 4, 3: 9}))
    assert status == OK and out["circuit"] is None


def test_circuit_window_restricts():
    status, _ = run(["circuit", "-", "--window", "3"], table({1: 0, 2: 0, 5: 1}))
    assert status == OK


def test_psum_round_trip():
    f = table({1: 1, 2: 4, 3: 9}, Progression(1, 1), 3)
    status, out = run(["psum", "-"], f)
    assert status == OK and out["coeffs"] == ["1", "3", "1"]
    back = function_from_json(out)
    assert back.values == {1: 1, 2: 4, 3: 9}


def test_function_json_round_trip():
    f = WindowFunction.from_callable(Progression(1, 3), 20, lambda x: x * x - 7)
    doc = json.loads(json.dumps(to_jsonable(function_to_json(f))))
    g = function_from_json(doc)
    assert g.values == f.values and g.window == f.window and g.domain == f.domain


def test_poly_repr_needs_domain():
    with pytest.raises(InputError):
        function_from_json({"repr": "poly", "coeffs": [1, 1]})
    f = function_from_json({"repr": "poly", "coeffs": ["0", "1/2", "1/2"],
                            "domain": set_to_json(Progression(1, 1)), "window": 5})
    assert f.values == {x: x * (x + 1) // 2 for x in range(1, 6)}


def test_split(tmp_path):
    u = write(tmp_path, "u.json", set_to_json(Progression(1, 2)))
    w = write(tmp_path, "w.json", set_to_json(Progression(1, 3)))
    f = write(tmp_path, "f.json", {"repr": "product-sum", "coeffs": [0, 1],
                                    "domain": set_to_json(Progression(1, 6))})
    status, out = run(["split", "--u", u, "--w", w, "--f", f, "--stages", "3"])
    assert status == OK
    g, h = function_from_json(out["g"]), function_from_json(out["h"])
    assert all(g(x) - h(x) == x - 1 for x in Progression(1, 6).enumerate(g.window))


def test_cech_cohomology_and_coboundary(tmp_path):
    star = {"pieces": [set_to_json(Progression(a, d)) for a, d in ((1, 2), (1, 3), (1, 5))], "window": 24}
    status, out = run(["cech", "--cover", "-"], star)
    assert status == OK and out["trivial"] is True
    status, out = run(["cech", "--cover", "-", "--degree", "0"], star)
    assert status == OK and out["rank"] != "0"
    cover = write(tmp_path, "c.json", {"pieces": [set_to_json(P) for P in mod15_cover()], "window": 30})
    # the indicator of 1 + 15N0 on the 0,2 overlap, zero elsewhere
    comps = {}
    for i in (0, 1):
        for j in range(2, 6):
            S = [x for x in range(1, 31) if mod15_cover()[i].contains(x) and mod15_cover()[j].contains(x)]
            comps[f"{i},{j}"] = table({x: int(x % 15 == 1) for x in S})
    cochain = write(tmp_path, "z.json", {"degree": 1, "components": comps})
    status, out = run(["cech", "--cover", cover, "--cochain", cochain])
    assert status == PROPERTY_FAILS
    assert out["is_coboundary"] is False and out["kind"] == "EXACT"


def test_obstruct():
    f = table({x: int(x % 15 == 1) for x in range(1, 31)}, Progression(1, 1), 30)
    status, out = run(["obstruct", "-"], f)
    assert status == PROPERTY_FAILS and out["value"] == "1" and out["residue"] == "1"
    status, out = run(["obstruct", "-"], table({x: x for x in range(1, 31)}, Progression(1, 1), 30))
    assert status == OK and out["value"] == "0"


def test_cex_output_feeds_circuit(tmp_path):
    q, trace = str(tmp_path / "q.json"), str(tmp_path / "t.json")
    status, out = run(["cex", "--window", "20", "--out", q, "--trace", trace])
    assert status == OK
    assert out["certificate"]["circuit"] == ["2", "4"]
    assert json.load(open(trace))[0]["mode"] == "START"
    status, circ = run(["circuit", q])
    assert status == PROPERTY_FAILS and circ["circuit"] == ["2", "4"]


def test_cex_bad_schedule():
    status, out = run(["cex", "--schedule", "CORE,LEFT"])
    assert status == INPUT_ERROR and "LEFT" in out["error"]
    status, _ = run(["cex", "--steps", "1", "--window", "40"])
    assert status == INPUT_ERROR


def test_selfcheck_uses_seed():
    status, out = run(["--seed", "9", "selfcheck", "--count", "30"])
    assert status == OK and out["seed"] == "9" and out["mismatches"] == []


@pytest.mark.parametrize(
    "argv,doc",
    [
        (["circuit", "-"], "{not json"),
        (["circuit", "-"], {"values": []}),
        (["circuit", "-"], {"repr": "table", "values": []}),
        (["circuit", "-"], {"repr": "table", "values": [["a", 1]]}),
        (["interp", "-"], "1,2,3\n"),
        (["interp", "-"], "1,0\n1,2\n"),
        (["circuit", "/no/such/file.json"], None),
        (["nonsense"], None),
        (["closure"], None),
        (["cech", "--cover", "-"], {"pieces": []}),
    ],
)
def test_malformed_input(argv, doc):
    status, out = run(argv, doc)
    assert status == INPUT_ERROR
    assert out["error"]


def test_main_writes_json_and_returns_code(capsys):
    code = main(["closure", "4", "10"])
    assert code == 0
    assert json.loads(capsys.readouterr().out) == {"kind": "progression", "a": "4", "d": "6"}


def test_console_entry_point(tmp_path):
    f = write(tmp_path, "f.json", table({2: 1, 4: 0}))
    proc = subprocess.run([sys.executable, "-m", "kirchlip.cli", "circuit", f], capture_output=True, text=True)
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["circuit"] == ["2", "4"]
    assert "not LIP" in proc.stderr
