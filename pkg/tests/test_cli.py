import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from swkit.cli import DSLError, SessionConfig, SetSpec, main, parse_dsl, serialize
from swkit.varieties import Poly

DEMOS = Path(__file__).resolve().parent.parent / "demos"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_conic():
    cfg = parse_dsl("field 3; var x,y; set C { eq: x^2+y^2-1; }")
    assert cfg.field == 3 and cfg.variables == ("x", "y")
    assert cfg.sets[0].name == "C"
    f = cfg.sets[0].equations[0]
    assert f((0, 1)) == 0 and f((1, 1)) != 0


def test_empty_file_defaults():
    cfg = parse_dsl("")
    assert cfg == SessionConfig()
    assert cfg.instance_kind == "finset"


def test_non_prime_field():
    with pytest.raises(DSLError, match="4 is not prime"):
        parse_dsl("field 4;")


def test_error_carries_position_and_expected():
    with pytest.raises(DSLError) as exc:
        parse_dsl("field 3;\nvar x;\nset A { eq: 2x; }")
    err = exc.value
    assert (err.line, err.col) == (3, 14)
    assert set(err.expected) >= {"+", "*", ";"}


def test_arity_mismatch():
    with pytest.raises(DSLError, match="arity mismatch"):
        parse_dsl("field 3; var x; set A { eq: x*y; }")


def test_precedence():
    cfg = parse_dsl("field 5; var x; set A { eq: -x^2 + 2*x*3; }")
    f = cfg.sets[0].equations[0]
    for v in range(5):
        assert f((v,)) == (-(v**2) + 6 * v) % 5


def test_variable_range_and_group():
    cfg = parse_dsl("field 2; var x1..x3; group { table: [[0,1],[1,0]]; } universe 2;")
    assert cfg.variables == ("x1", "x2", "x3")
    assert cfg.group == ((0, 1), (1, 0))
    assert cfg.universe == 2


def test_bad_group_table():
    with pytest.raises(DSLError):
        parse_dsl("group { table: [[0,0],[1,1]]; }")


def _polys(p, n):
    expo = st.tuples(*[st.integers(0, 3)] * n)
    return st.dictionaries(expo, st.integers(1, p - 1), max_size=4).map(lambda d: Poly.from_dict(p, n, d))


@st.composite
def configs(draw):
    p = draw(st.sampled_from([2, 3, 5, 7]))
    n = draw(st.integers(1, 3))
    names = tuple(f"x{i + 1}" for i in range(n))
    sets = []
    for k in range(draw(st.integers(0, 3))):
        eqs = tuple(draw(st.lists(_polys(p, n), max_size=2)))
        neqs = tuple(draw(st.lists(_polys(p, n), max_size=2)))
        sets.append(SetSpec(f"S{k}", eqs, neqs))
    uni = draw(st.one_of(st.none(), st.integers(0, 5)))
    return SessionConfig(p, names, tuple(sets), None, uni)


@settings(max_examples=80, deadline=None)
@given(configs())
def test_round_trip(cfg):
    text = serialize(cfg)
    again = parse_dsl(text)
    assert again == cfg
    assert serialize(again) == text


def test_round_trip_demo_file():
    cfg = parse_dsl((DEMOS / "conic.dsl").read_text())
    assert parse_dsl(serialize(cfg)) == cfg


def test_cli_measure_conic(capsys):
    code, out, _ = run(capsys, "measure", str(DEMOS / "conic.dsl"), "--json")
    doc = json.loads(out)
    assert code == 0
    assert doc["point_count"] == 4 and doc["k0_class"] == [4]
    assert doc["schema_version"] == 1
    assert all(c["holds"] for c in doc["excision_certificates"])


def test_cli_k0_finset(capsys):
    code, out, _ = run(capsys, "k0", "--instance", "finset", "--bound", "5", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["free_rank"] == 1 and doc["torsion"] == []


def test_cli_golden_appendix(capsys):
    code, out, _ = run(capsys, "additivity", "--golden-appendix")
    assert code == 0
    assert json.loads(out)["i"] == 3


def test_cli_exit_codes(capsys, tmp_path, monkeypatch):
    assert run(capsys, "nonsense")[0] == 2
    bad = tmp_path / "bad.dsl"
    bad.write_text("field 4;")
    assert run(capsys, "measure", str(bad))[0] == 2
    monkeypatch.setenv("SWKIT_BUDGET", "3")
    assert run(capsys, "measure", str(DEMOS / "conic.dsl"))[0] == 3


def test_cli_violation_exit(capsys, tmp_path):
    # a tabulated instance with a cofibration missing its leg
    from swkit.core import TabulatedInstance
    from swkit.instances import counterexample

    tab = TabulatedInstance.from_instance(counterexample("missing-subtraction"), None)
    f = tmp_path / "t.json"
    f.write_text(json.dumps(tab.to_json()))
    code, out, _ = run(capsys, "axioms", str(f), "--instance", "tabulated", "--json")
    assert code == 1
    assert not json.loads(out)["ok"]


def test_cli_is_deterministic(capsys):
    a = run(capsys, "additivity", "--bound", "3", "--samples", "15", "--seed", "9", "--json")
    b = run(capsys, "additivity", "--bound", "3", "--samples", "15", "--seed", "9", "--json")
    assert a == b and a[0] == 0


def test_cli_snf(capsys, tmp_path):
    f = tmp_path / "m.txt"
    f.write_text("2 4\n6 8\n")
    code, out, _ = run(capsys, "snf", str(f), "--json")
    doc = json.loads(out)
    assert code == 0 and doc["torsion"] == [2, 4] and doc["free_rank"] == 0


def test_cli_flags_and_splitting(capsys):
    assert run(capsys, "flags", "--instance", "finset", "--bound", "2", "--degree", "2")[0] == 0
    assert run(capsys, "splitting", "--bound", "4")[0] == 0
