import json

from seqhalt.cli import main


def invoke(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_prints_canonical_form(capsys):
    code, out, _ = invoke(capsys, "parse", "+f.dup;!t;!f")
    assert code == 0 and out.strip() == "+f.dup;!t;!f"


def test_parse_error_exits_2(capsys):
    code, _, err = invoke(capsys, "parse", "f.dup;;!t")
    assert code == 2 and "error:" in err


def test_run_converged(capsys):
    code, out, _ = invoke(capsys, "run", "!t", "f=counter:0")
    assert code == 0 and out.strip() == "T f=counter:0"


def test_run_dup(capsys):
    code, out, _ = invoke(capsys, "run", "f.dup;!t", "f=dup:|10")
    assert code == 0 and out.strip() == "T f=dup:|10:10"


def test_run_deadlock(capsys):
    code, out, _ = invoke(capsys, "run", "#0", "f=counter:0")
    assert code == 0 and out.strip() == "D(deadlock)"


def test_run_empty_family_and_unknown(capsys):
    code, out, _ = invoke(capsys, "run", "!t", "")
    assert code == 0 and out.strip() == "T"
    code, out, _ = invoke(capsys, "run", "f.succ;\\#1", "f=counter:0", "--fuel", "50")
    assert code == 0 and out.strip() == "UNKNOWN(50)"


def test_run_trace(capsys):
    code, out, _ = invoke(capsys, "run", "f.dup;!t", "f=dup:|1", "--trace")
    lines = out.strip().splitlines()
    assert lines[0] == "pc=1 action=f.dup reply=T state=f=dup:|1:1"
    assert lines[-1] == "T f=dup:|1:1"


def test_run_json(capsys):
    code, out, _ = invoke(capsys, "run", "f.dup;!t", "f=dup:|10", "--json")
    payload = json.loads(out)
    assert payload == {"outcome": "T", "family": "f=dup:|10:10", "steps": 1}


def test_transform_order(capsys):
    assert invoke(capsys, "transform", "--swap", "!t;!f")[1].strip() == "!f;!t"
    assert invoke(capsys, "transform", "--f2d", "!f")[1].strip() == "#0"
    assert invoke(capsys, "transform", "--swap", "--f2d", "!t")[1].strip() == "#0"
    assert invoke(capsys, "transform", "--f2d", "--swap", "!t")[1].strip() == "!f"


def test_encode_decode_round_trip(capsys):
    _, bits, _ = invoke(capsys, "encode", "!t")
    assert bits.strip() == "0010000101110100"
    code, out, _ = invoke(capsys, "decode", bits.strip())
    assert code == 0 and out.strip() == "!t"


def test_decode_non_encoding(capsys):
    code, out, _ = invoke(capsys, "decode", "0000000")
    assert code == 0 and out.strip() == "NOT-AN-ENCODING"


def test_decide_dup(capsys):
    assert invoke(capsys, "decide", "--unit", "dup", "f.dup;!t", "|")[1].strip() == "True"
    # programs starting with "-" need the usual end-of-options marker
    assert (
        invoke(capsys, "decide", "--unit", "dup", "--", "-f.dup;!t", "|")[1].strip()
        == "False"
    )


def test_decide_halting_empty(capsys):
    code, out, _ = invoke(capsys, "decide", "--unit", "halting-empty", "!f", "|101")
    assert code == 0 and out.strip() == "True"


def test_decide_foreign_method_exits_2(capsys):
    code, _, err = invoke(capsys, "decide", "--unit", "dup", "f.mvl;!t", "|")
    assert code == 2 and "error:" in err


def test_validate_solver_refuted_exits_1(capsys):
    code, out, _ = invoke(capsys, "validate-solver", "!t", "--json")
    assert code == 1
    record = json.loads(out)
    assert record["verdict"] == "refuted-by-wrong-reply"
    assert record["witnessProgram"] == "f.dup;#0"
    assert record["claimed"] == "T" and record["actual"] == "no"


def test_validate_solver_divergent(capsys):
    code, out, _ = invoke(capsys, "validate-solver", "#0")
    assert code == 1 and "refuted-by-divergence" in out


def test_check_interpreter(capsys):
    code, out, _ = invoke(
        capsys, "check-interpreter", "f.dup;!t;!f", "--sample", "!t@|"
    )
    assert code == 1
    assert "fail-apply" in out and "passed=false" in out


def test_sweep_suites(capsys):
    code, out, _ = invoke(capsys, "sweep", "--suite", "dup-decider", "--max-len", "2")
    assert code == 0 and out.strip() == "agree=182 disagree=0"
    code, out, _ = invoke(capsys, "sweep", "--suite", "diagonal", "--max-len", "1", "--json")
    assert code == 0
    assert json.loads(out)["not-refuted"] == 0
    code, out, _ = invoke(capsys, "sweep", "--suite", "empty-halting", "--max-len", "1")
    assert code == 0 and "disagree=0" in out


def test_sweep_guard(capsys):
    code, _, err = invoke(capsys, "sweep", "--suite", "dup-decider", "--max-len", "6")
    assert code == 2 and "guarded" in err


def test_outputs_reproducible(capsys):
    first = invoke(capsys, "validate-solver", "+f.dup;!t;!f", "--json")
    second = invoke(capsys, "validate-solver", "+f.dup;!t;!f", "--json")
    assert first == second
