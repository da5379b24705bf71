"""Command-line interface: formats, exit codes, error objects, determinism."""

import json
import math
import shutil
import subprocess
import sys

import numpy as np
import pytest

import oracles

from fuzznum.cli import main

TRI_A = '{"triangular": [12, 15, 19]}'
TRI_B = '{"triangular": [5, 9, 11]}'

FUNC_DECAY = ('{"func": "A*exp(-x)", '
              '"constants": {"A": {"triangular": [-1, 0, 2]}}, '
              '"domain": [0, 2]}')

FUNC_RAMP = ('{"func": "A*(1-x)", '
             '"constants": {"A": {"triangular": [0, 1, 2]}}, '
             '"domain": [0, 3]}')

FUNC_SWITCHY = ('{"func": "A*(cos(x) - x^2/32)", '
                '"constants": {"A": {"trapezoidal": [2, 4, 5, 8]}}, '
                '"domain": [-2, 2]}')

SPEC_TRIG = {
    "rhs": "-Y + C1*cos(x)",
    "constants": {"C1": {"triangular": [-2, 1, 4]}},
    "initial": {"triangular": [1, 2, 3]},
    "span": [0, 4],
    "step": 0.05,
    "alpha_levels": 21,
}

SPEC_INTEREST_D = {
    "rhs": "0.05*Y + K",
    "constants": {"K": {"triangular": [-160, 0, 160]}},
    "initial": {"triangular": [3000, 3500, 4000]},
    "span": [0, 50],
    "step": 0.05,
    "alpha_levels": 11,
    "method": "coupled-d",
}


def run_cli(capsys, *argv):
    rc = main(list(argv))
    cap = capsys.readouterr()
    return rc, cap.out, cap.err


def parse_table(out):
    """Split CLI output into (comments, header, rows-of-floats-or-strings)."""
    lines = out.splitlines()
    comments = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    header, rows = body[0], [l.split(",") for l in body[1:]]
    return comments, header, rows


def float_rows(rows):
    return np.array([[float(v) for v in row] for row in rows])


# -- arith --------------------------------------------------------------------


def test_gpsub_worked_example(capsys):
    rc, out, err = run_cli(capsys, "arith", "--a", TRI_A, "--b", TRI_B,
                           "--op", "gpsub")
    assert rc == 0 and err == ""
    comments, header, rows = parse_table(out)
    assert comments == [] and header == "alpha,lower,upper"
    assert len(rows) == 101
    assert ",".join(rows[0]) == "0,6,8"
    assert ",".join(rows[-1]) == "1,6,6"
    tab = float_rows(rows)
    al = tab[:, 0]
    np.testing.assert_allclose(tab[:, 1], 6.0 * np.ones_like(al), atol=1e-9)
    np.testing.assert_allclose(tab[:, 2], 8.0 - 2.0 * al, atol=1e-9)


def test_sub_standard_semantics(capsys):
    rc, out, _ = run_cli(capsys, "arith", "--a", TRI_A, "--b", TRI_B,
                         "--op", "sub")
    assert rc == 0
    tab = float_rows(parse_table(out)[2])
    al = tab[:, 0]
    np.testing.assert_allclose(tab[:, 1], 1.0 + 5.0 * al, atol=1e-9)
    np.testing.assert_allclose(tab[:, 2], 14.0 - 8.0 * al, atol=1e-9)


def test_psub_reports_existence_and_condition(capsys):
    rc, out, _ = run_cli(capsys, "arith", "--a", '{"triangular": [1, 2, 3]}',
                         "--b", "1", "--op", "psub")
    assert rc == 0
    comments, header, rows = parse_table(out)
    assert comments == ["# exists: true", "# condition: nondecreasing"]
    assert header == "alpha,lower,upper"
    assert ",".join(rows[0]) == "0,0,2"
    tab = float_rows(rows)
    np.testing.assert_allclose(tab[:, 1], tab[:, 0], atol=1e-12)
    np.testing.assert_allclose(tab[:, 2], 2.0 - tab[:, 0], atol=1e-12)


def test_slcia_self_difference_is_crisp_zero(capsys):
    rc, out, _ = run_cli(capsys, "arith", "--a", '{"triangular": [1, 2, 3]}',
                         "--b", '{"triangular": [1, 2, 3]}',
                         "--op", "sub", "--sem", "slcia")
    assert rc == 0
    tab = float_rows(parse_table(out)[2])
    np.testing.assert_allclose(tab[:, 1:], 0.0, atol=1e-12)


def test_alpha_levels_flag_sets_row_count(capsys):
    rc, out, _ = run_cli(capsys, "arith", "--a", TRI_A, "--b", TRI_B,
                         "--op", "gpsub", "--alpha-levels", "11")
    assert rc == 0
    assert len(parse_table(out)[2]) == 11


def test_alpha_levels_must_be_at_least_two(capsys):
    rc, out, err = run_cli(capsys, "arith", "--a", TRI_A, "--b", TRI_B,
                           "--op", "gpsub", "--alpha-levels", "1")
    assert rc == 2 and out == ""
    doc = json.loads(err)
    assert doc["error"] == "SpecError"
    assert "alpha-levels" in doc["detail"]


def test_division_by_zero_spanning_operand(capsys):
    rc, _, err = run_cli(capsys, "arith", "--a", TRI_A,
                         "--b", '{"triangular": [-1, 0, 1]}', "--op", "div")
    assert rc == 2
    assert json.loads(err)["error"] == "DivisionBySpanningZero"


# -- input plumbing -------------------------------------------------------------


def test_bad_json_operand(capsys):
    rc, out, err = run_cli(capsys, "arith", "--a", '{"triangular": [1, 2',
                           "--b", TRI_B, "--op", "sub")
    assert rc == 2 and out == ""
    doc = json.loads(err)
    assert doc["error"] == "SpecError"
    assert "invalid JSON" in doc["detail"]


def test_expression_parse_error_reports_offset(capsys):
    rc, _, err = run_cli(capsys, "diff", "--func",
                         '{"func": "sin(", "domain": [0, 1]}', "--x", "0.5")
    assert rc == 2
    doc = json.loads(err)
    assert doc["error"] == "ParseError"
    assert isinstance(doc["offset"], int)
    assert isinstance(doc["expected"], list) and doc["expected"]


def test_unknown_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["arith", "--a", TRI_A, "--b", TRI_B, "--op", "sub", "--nope"])
    assert exc.value.code == 2
    doc = json.loads(capsys.readouterr().err)
    assert doc["error"] == "UsageError"


def test_at_file_operand_matches_inline(capsys, tmp_path):
    path = tmp_path / "a.json"
    path.write_text(TRI_A, encoding="utf-8")
    rc, inline_out, _ = run_cli(capsys, "arith", "--a", TRI_A, "--b", TRI_B,
                                "--op", "gpsub")
    rc2, file_out, _ = run_cli(capsys, "arith", "--a", f"@{path}", "--b",
                               TRI_B, "--op", "gpsub")
    assert rc == rc2 == 0
    assert file_out == inline_out


def test_missing_at_file(capsys, tmp_path):
    rc, _, err = run_cli(capsys, "arith", "--a", f"@{tmp_path}/nope.json",
                         "--b", TRI_B, "--op", "sub")
    assert rc == 2
    doc = json.loads(err)
    assert doc["error"] == "SpecError"
    assert "cannot read" in doc["detail"]


def test_out_flag_writes_stdout_bytes_to_file(capsys, tmp_path):
    path = tmp_path / "table.csv"
    rc, out, _ = run_cli(capsys, "arith", "--a", TRI_A, "--b", TRI_B,
                         "--op", "gpsub")
    rc2, silent, _ = run_cli(capsys, "arith", "--a", TRI_A, "--b", TRI_B,
                             "--op", "gpsub", "--out", str(path))
    assert rc == rc2 == 0 and silent == ""
    text = path.read_text(encoding="utf-8")
    assert text == out
    assert text.endswith("\n")


# -- diff ----------------------------------------------------------------------


def test_diff_p_comment_block_and_values(capsys):
    rc, out, _ = run_cli(capsys, "diff", "--func", FUNC_DECAY, "--x", "1")
    assert rc == 0
    comments, header, rows = parse_table(out)
    assert comments == ["# x: 1", "# kind: p", "# classification: d_p",
                        "# exists: true"]
    assert header == "alpha,lower,upper"
    e1 = math.exp(-1.0)
    assert rows[0] == ["0", f"{-2 * e1:.12g}", f"{e1:.12g}"]
    tab = float_rows(rows)
    al = tab[:, 0]
    np.testing.assert_allclose(tab[:, 1], -(2 - 2 * al) * e1, atol=1e-9)
    np.testing.assert_allclose(tab[:, 2], (1 - al) * e1, atol=1e-9)


def test_diff_gp_matches_p_where_lateral(capsys):
    rc, p_out, _ = run_cli(capsys, "diff", "--func", FUNC_DECAY, "--x", "1")
    rc2, gp_out, _ = run_cli(capsys, "diff", "--func", FUNC_DECAY, "--x", "1",
                             "--kind", "gp")
    assert rc == rc2 == 0
    gp_comments = parse_table(gp_out)[0]
    assert gp_comments == ["# x: 1", "# kind: gp"]
    p_tab = float_rows(parse_table(p_out)[2])
    gp_tab = float_rows(parse_table(gp_out)[2])
    np.testing.assert_allclose(gp_tab, p_tab, atol=1e-9)


# -- integrate -------------------------------------------------------------------


def test_integrate_coefficient_mode(capsys):
    rc, out, _ = run_cli(capsys, "integrate", "--func", FUNC_RAMP)
    assert rc == 0
    comments, _, rows = parse_table(out)
    assert comments == ["# from: 0", "# to: 3"]
    tab = float_rows(rows)
    al = tab[:, 0]
    np.testing.assert_allclose(tab[:, 1], -3.0 + 1.5 * al, atol=1e-8)
    np.testing.assert_allclose(tab[:, 2], -1.5 * al, atol=1e-8)


def test_integrate_endpoint_mode(capsys):
    func = FUNC_RAMP[:-1] + ', "mode": "endpoint"}'
    rc, out, _ = run_cli(capsys, "integrate", "--func", func)
    assert rc == 0
    tab = float_rows(parse_table(out)[2])
    al = tab[:, 0]
    np.testing.assert_allclose(tab[:, 1], -4.0 + 2.5 * al, atol=1e-8)
    np.testing.assert_allclose(tab[:, 2], 1.0 - 2.5 * al, atol=1e-8)


def test_integrate_range_flags(capsys):
    rc, out, _ = run_cli(capsys, "integrate", "--func", FUNC_RAMP,
                         "--a", "0", "--b", "1")
    assert rc == 0
    comments, _, rows = parse_table(out)
    assert comments == ["# from: 0", "# to: 1"]
    tab = float_rows(rows)
    al = tab[:, 0]
    np.testing.assert_allclose(tab[:, 1], 0.5 * al, atol=1e-8)
    np.testing.assert_allclose(tab[:, 2], 1.0 - 0.5 * al, atol=1e-8)


# -- switch-points ----------------------------------------------------------------


def test_switch_points_regions_and_rows(capsys):
    rc, out, _ = run_cli(capsys, "switch-points", "--func", FUNC_SWITCHY,
                         "--scan", "801")
    assert rc == 0
    comments, header, rows = parse_table(out)
    assert header == "x,kind"
    labels = [c.split()[-1] for c in comments]
    assert labels == ["d_p", "i_p", "d_p", "i_p"]
    assert float(comments[0].split()[2]) == pytest.approx(-2.0, abs=1e-3)
    assert [r[1] for r in rows] == ["typeII", "typeI", "typeII"]
    xs = [float(r[0]) for r in rows]
    assert xs[0] == pytest.approx(-oracles.root_a_314, abs=1e-3)
    assert xs[1] == pytest.approx(0.0, abs=1e-3)
    assert xs[2] == pytest.approx(oracles.root_a_314, abs=1e-3)


# -- solve -----------------------------------------------------------------------


def solve_argv(spec_path, *extra):
    return ["solve", "--spec", f"@{spec_path}"] + list(extra)


@pytest.fixture()
def trig_spec(tmp_path):
    path = tmp_path / "trig.json"
    path.write_text(json.dumps(SPEC_TRIG), encoding="utf-8")
    return path


def test_solve_table_shape_and_determinism(capsys, trig_spec):
    rc, out1, _ = run_cli(capsys, *solve_argv(trig_spec))
    rc2, out2, _ = run_cli(capsys, *solve_argv(trig_spec))
    assert rc == rc2 == 0
    assert out1 == out2
    lines = out1.splitlines()
    assert lines[0] == "# method: parametric"
    assert lines[1] == "x,alpha,lower,upper"
    # 81 nodes at step 0.05 over [0, 4], 21 levels each, x-major order.
    assert len(lines) == 2 + 81 * 21
    first = lines[2].split(",")
    assert first[:2] == ["0", "0"]
    assert [float(v) for v in first[2:]] == [1.0, 3.0]


def test_solve_final_cut_reingests_as_fuzzy_number(capsys, trig_spec):
    from fuzznum import FuzzyNumber

    rc, out, _ = run_cli(capsys, *solve_argv(trig_spec))
    assert rc == 0
    rows = [l.split(",") for l in out.splitlines()[2:]]
    tail = [r for r in rows if float(r[0]) == 4.0]
    assert len(tail) == 21
    al = [float(r[1]) for r in tail]
    lo = [float(r[2]) for r in tail]
    hi = [float(r[3]) for r in tail]
    fz = FuzzyNumber.from_samples(al, lo, hi)
    ref_lo, ref_hi = oracles.ex46_envelope(4.0, np.array(al))
    np.testing.assert_allclose(lo, ref_lo, atol=1e-4)
    np.testing.assert_allclose(hi, ref_hi, atol=1e-4)
    assert fz.cuts()[0][0] == pytest.approx(ref_lo[0], abs=1e-4)


def test_solve_flag_overrides_spec(capsys, trig_spec):
    rc, out, _ = run_cli(capsys, *solve_argv(trig_spec, "--method",
                                             "coupled-d", "--step", "0.5",
                                             "--alpha-levels", "5"))
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "# method: coupled"
    assert len(lines) == 2 + 9 * 5


def test_solve_switch_out_document(capsys, tmp_path):
    spec_path = tmp_path / "interest.json"
    spec_path.write_text(json.dumps(SPEC_INTEREST_D), encoding="utf-8")
    sw_path = tmp_path / "switches.json"
    rc, out, _ = run_cli(capsys, *solve_argv(spec_path, "--switch-out",
                                             str(sw_path)))
    assert rc == 0
    assert out.splitlines()[0] == "# method: coupled"
    text = sw_path.read_text(encoding="utf-8")
    assert text.endswith("\n")
    doc = json.loads(text)
    assert sorted(doc) == ["branches", "crossings", "switches"]
    assert len(doc["switches"]) == 1
    assert doc["switches"][0]["kind"] == "typeII"
    assert doc["switches"][0]["x"] == pytest.approx(oracles.X47_SWITCH,
                                                    abs=1e-3)
    assert doc["crossings"] == []
    assert [b["branch"] for b in doc["branches"]] == ["d", "i"]
    assert doc["branches"][0]["x"] == 0.0


def test_solve_blowup_exits_3(capsys, tmp_path):
    spec = {"rhs": "Y*Y", "initial": 1.0, "span": [0, 2], "step": 0.01}
    path = tmp_path / "blowup.json"
    path.write_text(json.dumps(spec), encoding="utf-8")
    rc, _, err = run_cli(capsys, *solve_argv(path))
    assert rc == 3
    doc = json.loads(err)
    assert doc["error"] == "IntegrationBlowup"
    assert "near x=" in doc["detail"]


def test_solve_coarse_sweep_exits_3(capsys, tmp_path):
    spec = {"rhs": "-Y + C1*C1",
            "constants": {"C1": {"triangular": [-1, 0.5, 2]}},
            "initial": {"triangular": [0, 1, 2]},
            "span": [0, 2], "step": 0.02, "param_grid": 5}
    path = tmp_path / "quad.json"
    path.write_text(json.dumps(spec), encoding="utf-8")
    rc, _, err = run_cli(capsys, *solve_argv(path))
    assert rc == 3
    assert json.loads(err)["error"] == "InvalidLevelSet"


def test_solve_missing_spec_file(capsys, tmp_path):
    rc, _, err = run_cli(capsys, *solve_argv(tmp_path / "nope.json"))
    assert rc == 2
    assert "cannot read" in json.loads(err)["detail"]


# -- console script -----------------------------------------------------------


def test_console_script_matches_in_process(capsys):
    exe = shutil.which("fuzznum")
    argv = ["arith", "--a", TRI_A, "--b", TRI_B, "--op", "gpsub",
            "--alpha-levels", "21"]
    rc, out, _ = run_cli(capsys, *argv)
    assert rc == 0
    if exe is None:
        cmd = [sys.executable, "-m", "fuzznum.cli"] + argv
    else:
        cmd = [exe] + argv
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == out
