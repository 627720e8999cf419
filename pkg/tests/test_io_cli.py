import json

import pytest

from conftest import two_state_graph
from vassreach.cli import main
from vassreach.errors import ParseError
from vassreach.io import emit_vass, emit_witness, parse_config, parse_query, parse_vass, read_witness
from vassreach.solver import reach3

TWO_STATE = """dim 3
state p
state q
init p
final p
trans t1 p q 0 -1 -2
trans t2 q p 1 1 0
trans t3 q q 0 1 2
"""


@pytest.fixture
def two_state_file(tmp_path):
    path = tmp_path / "two_state.vass"
    path.write_text(TWO_STATE)
    return str(path)


def test_parse_two_state():
    g = parse_vass(TWO_STATE)
    assert g.states == ("p", "q") and len(g.transitions) == 3
    assert g == two_state_graph()
    assert parse_vass(emit_vass(g)) == g
    assert emit_vass(parse_vass(emit_vass(g))) == emit_vass(g)


def test_parse_edgeless_and_comments():
    g = parse_vass("dim 3  # three counters\nstate p\n")
    assert g.transitions == () and g.q_in == g.q_out == "p"


@pytest.mark.parametrize("text, line", [
    ("dim 3\nstate p\ntrans t p p 1 2\n", 3),
    ("dim 3\nstate p\ntrans t p r 1 2 3\n", 3),
    ("dim 3\nstate p\nbogus\n", 3),
    ("state p\n", 1),
    ("dim 3\nstate p\ntrans t p p 1 x 3\n", 3),
])
def test_parse_errors(text, line):
    with pytest.raises(ParseError) as e:
        parse_vass(text)
    assert e.value.line == line


def test_configs_and_queries():
    c = parse_config("q 1 2 3", 3)
    assert (c.state, c.location) == ("q", (1, 2, 3))
    with pytest.raises(ParseError):
        parse_config("q 1 2", 3)
    src, dst = parse_query("from p 0 0 0\nto q 1 1 1\n", 3)
    assert src.state == "p" and dst.location == (1, 1, 1)
    with pytest.raises(ParseError):
        parse_query("from p 0 0 0\n", 3)


def test_witness_json_round_trip():
    g = parse_vass(TWO_STATE)
    res = reach3(g, "p", (22, 22, 22), "p", (42, 42, 22))
    doc = json.loads(emit_witness(res, g, steps=True))
    assert doc["decision"] == "Reachable" and doc["bound_relative"] is False
    assert doc["witness"]["start"] == ["p", 22, 22, 22] and doc["witness"]["end"] == ["p", 42, 42, 22]
    assert doc["witness"]["steps"][-1] == ["p", 42, 42, 22]
    assert read_witness(emit_witness(res, g), g) == res.witness


def test_cli_reach_exit_codes(two_state_file, capsys):
    assert main(["reach", "--input", two_state_file, "--from", "p 22 22 22", "--to", "p 42 42 22", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["decision"] == "Reachable"
    assert main(["reach", "--input", two_state_file, "--from", "p 0 0 0", "--to", "q 0 0 0"]) == 1
    assert "UnreachableProven" in capsys.readouterr().out
    # caps must be positive
    assert main(["reach", "--input", two_state_file, "--from", "p 0 0 0", "--to", "q 0 0 0", "--max-depth", "0"]) == 3
    assert main(["reach", "--input", two_state_file, "--from", "p 0 0", "--to", "q 0 0 0"]) == 3
    assert main(["reach", "--input", two_state_file + ".missing", "--from", "p 0 0 0", "--to", "q 0 0 0"]) == 3
    assert main(["reach", "--input", two_state_file, "--from", "z 0 0 0", "--to", "q 0 0 0"]) == 3


def test_cli_unknown_on_caps(tmp_path, capsys):
    path = tmp_path / "loops.vass"
    path.write_text("dim 3\nstate p\ntrans a p p 1 0 0\ntrans b p p 0 1 0\ntrans c p p 0 0 -1\n")
    code = main(["reach", "--input", str(path), "--from", "p 0 0 5", "--to", "p 2 3 0", "--max-depth", "1"])
    assert code == 2 and "Unknown" in capsys.readouterr().out


def test_cli_other_commands(two_state_file, capsys):
    assert main(["oracle", "--input", two_state_file, "--from", "p 0 0 0", "--to", "q 0 0 0", "--box", "5"]) in (1, 2)
    assert main(["hilbert", "--matrix", "1 -1; 2 -2"]) == 0
    assert capsys.readouterr().out.split("\n")[-2] == "1 1"
    assert main(["hilbert", "--matrix", "1 -1", "--rhs", "1"]) == 0
    assert "minimal:" in capsys.readouterr().out
    assert main(["lps-enum", "--input", two_state_file, "--from-state", "p", "--to-state", "p", "--length", "2",
                 "--cycles", "1"]) == 0
    assert capsys.readouterr().out.strip()
    assert main(["decompose", "--input", two_state_file, "--from", "p 0 0 0", "--to", "q 0 0 0", "--steps", "3"]) in (0, 1, 2)
    assert capsys.readouterr().out
