import io
import json

import pytest

from mtlab.binlab import TableBin, bin_from_json, Werf
from mtlab.cli import main
from mtlab.costs import CostTable
from mtlab.boolfn import FunctionFamily, TruthTable
from mtlab.ecf import cstar
from mtlab.setsys import WeightedSetSystem, intro_system
from mtlab.synth import SynthesisSpec, lift_bins_by_weight
from mtlab.tusp import SearchProblem


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ecf_validate_cstar(capsys, files):
    code, out, _ = run(capsys, "ecf", "validate", files("c.json", cstar().to_json()))
    assert code == 0 and "axioms (1)(2)(3): pass" in out


def test_ecf_validate_bad(capsys, files):
    code, out, _ = run(capsys, "ecf", "validate", files("b.json", {"l": 2, "values": [0, 1, 1, 3]}))
    assert code == 1 and "X=10, Y=01" in out


def test_hs_table_is_cstar(capsys, files):
    code, out, _ = run(capsys, "hs", "table", "--json", files("a.json", intro_system().to_json()))
    assert code == 0 and CostTable.from_json(json.loads(out)) == cstar()


def test_hs_solve(capsys, files):
    code, out, _ = run(capsys, "hs", "solve", files("a.json", intro_system().to_json()), "--X", "111", "--json")
    assert json.loads(out) == {"X": "111", "hitting_set": ["u1", "u2"], "weight": 2}


def test_usage_errors(capsys, files):
    assert run(capsys, "ecf", "random", "--l", "3")[0] == 2  # seed is mandatory
    assert run(capsys, "ecf", "validate", "/nonexistent.json")[0] == 2
    assert run(capsys, "ecf", "frobnicate")[0] == 2
    assert run(capsys, "ecf", "cstar", "--bogus")[0] == 2
    assert run(capsys, "ecf", "validate", files("x.json", {"l": 2}))[0] == 2
    assert run(capsys, "hs", "solve", files("a.json", intro_system().to_json()), "--X", "11")[0] == 2


def test_stdin_input(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(cstar().to_json())))
    assert run(capsys, "ecf", "validate", "-")[0] == 0


def test_seeded_outputs_are_byte_identical(capsys):
    for argv in (
        ["ecf", "random", "--l", "4", "--seed", "9", "--json"],
        ["werf", "random", "--m", "6", "--d", "4", "--t", "2", "--seed", "1", "--json"],
        ["tusp", "find-gap", "--n", "4", "--seed", "2", "--json"],
    ):
        a = run(capsys, *argv)[1]
        b = run(capsys, *argv)[1]
        assert a == b and a


def test_werf_random_prints_bound_and_reparses(capsys, files):
    code, out, err = run(capsys, "werf", "random", "--m", "6", "--d", "4", "--t", "2", "--seed", "1", "--json")
    assert code == 0 and "(1 - 1/4)^(2^(6-2))" in err
    J = Werf.from_json(json.loads(out))
    code, out, _ = run(capsys, "werf", "verify", files("j.json", J.to_json()), "--t", "2")
    assert code == 0
    code, _, _ = run(capsys, "werf", "verify", files("p.json", {"m": 2, "d": 4, "table": [1, 2, 3, 4]}), "--t", "1")
    assert code == 1


def test_werf_exhaustion_exit_code(capsys):
    code, _, err = run(capsys, "werf", "random", "--m", "3", "--d", "8", "--t", "1", "--seed", "0", "--max-tries", "2")
    assert code == 1 and "(1 - 1/8)" in err


def test_ecf_realize_and_random(capsys, files):
    code, out, _ = run(capsys, "ecf", "random", "--l", "3", "--seed", "4", "--json")
    C = CostTable.from_json(json.loads(out))
    code, out, _ = run(capsys, "ecf", "realize", files("c.json", C.to_json()), "--json")
    obj = json.loads(out)
    assert code == 0 and obj["reproduces"]
    WeightedSetSystem.from_json(obj["system"])


def test_dt_commands(capsys, files):
    f = TruthTable.from_function(3, lambda b: b[0] ^ b[1] ^ b[2])
    code, out, _ = run(capsys, "dt", "depth", files("f.json", f.to_json()), "--json")
    assert json.loads(out) == {"depth": 3}
    code, out, _ = run(capsys, "dt", "tree", files("f.json", f.to_json()))
    assert out.startswith("depth 3")
    F = FunctionFamily([TruthTable.variable(2, 1), TruthTable.variable(2, 2)])
    code, out, _ = run(capsys, "dt", "cost-table", files("F.json", F.to_json()), "--json", "--threads", "2")
    assert code == 0 and json.loads(out)["values"] == [0, 1, 1, 2]


def test_tusp_commands(capsys, files):
    W = files("w.json", SearchProblem(2, ["11", "0*", "10"]).to_json())
    assert run(capsys, "tusp", "classify", W)[0] == 0
    assert run(capsys, "tusp", "classify", files("bad.json", ["1*", "*1"]))[0] == 1
    assert json.loads(run(capsys, "tusp", "depth", W, "--json")[1]) == {"s": 2, "depth": 2}
    code, out, _ = run(capsys, "tusp", "solve", W, "--json")
    assert code == 0 and json.loads(out)["worst"] <= 3
    udnf = {"n": 2, "f1": [[{"v": 1, "neg": False}, {"v": 2, "neg": False}]],
            "f2": [[{"v": 1, "neg": True}], [{"v": 1, "neg": False}, {"v": 2, "neg": True}]]}
    code, out, _ = run(capsys, "tusp", "from-udnf", files("u.json", udnf), "--json")
    assert code == 0 and SearchProblem.from_json(json.loads(out)) == SearchProblem(2, ["11", "0*", "10"])
    udnf["f2"] = [[{"v": 1, "neg": True}], [{"v": 2, "neg": True}]]
    code, _, err = run(capsys, "tusp", "from-udnf", files("u2.json", udnf))
    assert code == 2 and "00" in err


def test_bin_commands(capsys, files):
    W = files("w.json", SearchProblem(1, ["0", "1"]).to_json())
    code, out, _ = run(capsys, "bin", "build", "--tusp", W, "--parity", "2", "--json")
    b = bin_from_json(json.loads(out))
    assert code == 0 and b.arity == 7
    bf = files("b.json", b.to_json())
    code, out, _ = run(capsys, "bin", "security", bf, "--q", "0", "--json")
    assert json.loads(out)["security"] == "1"
    t = files("t.json", TableBin(1, 1, [0, 1]).to_json())
    assert run(capsys, "bin", "certify", t, "--T", "1", "--delta", "1")[0] == 0
    code, out, _ = run(capsys, "bin", "certify", t, "--T", "1", "--delta", "0.5")
    assert code == 1 and "FAIL" in out
    code, out, _ = run(capsys, "bin", "lift", t, "--c", "3", "--json")
    assert bin_from_json(json.loads(out)).arity == 3


def test_synth_commands(capsys, files):
    spec = lift_bins_by_weight(TableBin(1, 1, [0, 1]), intro_system())
    sf = files("s.json", spec.to_json())
    code, out, _ = run(capsys, "synth", "build", sf, "--json")
    assert code == 0 and FunctionFamily.from_json(json.loads(out)).l == 3
    code, out, _ = run(capsys, "synth", "solve", sf, "--X", "111", "--json")
    assert code == 0 and json.loads(out)["worst"] == 3
    code, out, _ = run(capsys, "synth", "verify", sf, "--T", "1", "--eps", "1")
    assert code == 0 and "uncovered X: none" in out
    code, out, _ = run(capsys, "synth", "verify", sf, "--T", "1", "--eps", "1", "--json")
    assert json.loads(out)["pass"]
    SynthesisSpec.from_json(spec.to_json())


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == 0
