import re

import pytest

from emu_roster import parse_plan, parse_timetable, render_plan, validate, build_matrices
from emu_roster.cli import main

FIG1 = "tests/data/fig1.timetable"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_writes_parseable_file(tmp_path, capsys):
    out = tmp_path / "tt.txt"
    code, _, _ = run(capsys, "gen", "--pairs", "3", "--turnbacks", "2", "--seed", "9",
                     "--out", str(out))
    assert code == 0
    inst = parse_timetable(out.read_text())
    assert inst.n == 6


def test_gen_stdout_deterministic(capsys):
    code1, out1, _ = run(capsys, "gen", "--pairs", "2", "--seed", "4")
    code2, out2, _ = run(capsys, "gen", "--pairs", "2", "--seed", "4")
    assert code1 == code2 == 0
    assert out1 == out2


def test_solve_fig1_end_to_end(tmp_path, capsys):
    plan_path = tmp_path / "plan.txt"
    code, out, err = run(capsys, "solve", FIG1, "--out", str(plan_path),
                         "--particles", "10", "--iters", "40", "--seed", "3")
    assert code == 0
    assert "objective" in out
    inst = parse_timetable(open(FIG1).read())
    plan = parse_plan(plan_path.read_text())
    assert validate(plan, inst, build_matrices(inst)).ok
    trace = (tmp_path / "plan.txt.trace.csv").read_text().splitlines()
    assert trace[0] == "iter,global_best_fitness,feasible_fraction"
    assert len(trace) == 42  # header + init row + 40 iterations


def test_solve_byte_identical_across_runs(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    code1, out1, _ = run(capsys, "solve", FIG1, "--out", str(a),
                         "--particles", "6", "--iters", "25", "--seed", "11")
    code2, out2, _ = run(capsys, "solve", FIG1, "--out", str(b),
                         "--particles", "6", "--iters", "25", "--seed", "11")
    assert code1 == code2 == 0
    assert out1 == out2
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.txt.trace.csv").read_bytes() == (tmp_path / "b.txt.trace.csv").read_bytes()


def test_solve_rejects_malformed_file(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("maint_station C\ntrain 1 C 8h00 A 10:00 300.0 120\n")
    code, _, err = run(capsys, "solve", str(bad), "--out", str(tmp_path / "p.txt"))
    assert code == 1
    assert "line 2" in err


def test_solve_flow_imbalance_is_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text(
        "maint_station C\n"
        "train 1 C 08:00 A 10:00 300.0 120\n"
        "train 2 A 11:00 C 13:00 300.0 120\n"
        "train 3 C 09:00 A 11:00 300.0 120\n"
    )
    code, _, err = run(capsys, "solve", str(bad), "--out", str(tmp_path / "p.txt"))
    assert code == 1
    assert "flow imbalance" in err


def test_solve_infeasible_instance_exit_2(tmp_path, capsys):
    tt = tmp_path / "big.txt"
    tt.write_text(
        "maint_station C\n"
        "train 1 C 08:00 X 12:00 4500.0 240\n"
        "train 2 X 13:00 C 17:00 4500.0 240\n"
    )
    with pytest.warns(Warning):
        code, _, err = run(capsys, "solve", str(tt), "--out", str(tmp_path / "p.txt"))
    assert code == 2
    assert "infeasible" in err


def test_validate_ok_plan(tmp_path, capsys):
    plan_path = tmp_path / "plan.txt"
    run(capsys, "solve", FIG1, "--out", str(plan_path),
        "--particles", "6", "--iters", "20", "--seed", "2")
    code, out, _ = run(capsys, "validate", FIG1, str(plan_path))
    assert code == 0
    assert out == ""


def test_validate_reports_eq11(tmp_path, capsys):
    tt = tmp_path / "tt.txt"
    tt.write_text(
        "maint_station C\n"
        "train 1 C 08:00 X 10:00 2200.0 120\n"
        "train 2 X 11:00 C 13:00 2200.0 120\n"
    )
    plan = tmp_path / "plan.txt"
    plan.write_text("cycle\npos 1 train 1 maint 0\npos 2 train 2 maint 1\n")
    code, out, _ = run(capsys, "validate", str(tt), str(plan))
    assert code == 3
    lines = out.splitlines()
    assert len(lines) == 1 and lines[0].startswith("EQ11")


def test_validate_unknown_train_exit_1(tmp_path, capsys):
    plan = tmp_path / "plan.txt"
    plan.write_text(
        "cycle\n" + "".join(
            f"pos {d} train {d + 30} maint {1 if d == 12 else 0}\n" for d in range(1, 13)
        )
    )
    code, _, err = run(capsys, "validate", FIG1, str(plan))
    assert code == 1
    assert "unknown train" in err


def test_validate_length_mismatch_exit_1(tmp_path, capsys):
    plan = tmp_path / "plan.txt"
    plan.write_text("cycle\npos 1 train 1 maint 1\n")
    code, _, err = run(capsys, "validate", FIG1, str(plan))
    assert code == 1


def test_compare_small_instance(tmp_path, capsys):
    tt = tmp_path / "tt.txt"
    code, out, _ = run(capsys, "gen", "--pairs", "3", "--seed", "1", "--out", str(tt))
    assert code == 0
    code, out, _ = run(capsys, "compare", str(tt), "--particles", "10", "--iters", "40",
                       "--seed", "2")
    assert code == 0
    values = dict(line.split(" ", 1) for line in out.splitlines())
    assert float(values["relative_gap"]) >= -1e-12
    assert values["heuristic_feasible"] == "true"


def test_compare_two_train_zero_gap(tmp_path, capsys):
    tt = tmp_path / "tt.txt"
    run(capsys, "gen", "--pairs", "1", "--seed", "3", "--out", str(tt))
    code, out, _ = run(capsys, "compare", str(tt), "--particles", "4", "--iters", "5")
    assert code == 0
    values = dict(line.split(" ", 1) for line in out.splitlines())
    assert float(values["relative_gap"]) == pytest.approx(0.0, abs=1e-12)


def test_compare_too_large_exit_1(tmp_path, capsys):
    tt = tmp_path / "tt.txt"
    run(capsys, "gen", "--pairs", "20", "--seed", "1", "--out", str(tt))
    code, _, err = run(capsys, "compare", str(tt))
    assert code == 1
    assert "too large" in err


def test_diagram_fixture_plan(tmp_path, capsys, fig1, fig1_matrices, fig1_plan):
    dot_path = tmp_path / "plan.dot"
    plan_path = tmp_path / "plan.txt"
    plan_path.write_text(render_plan(fig1_plan, fig1, fig1_matrices))
    code, _, _ = run(capsys, "diagram", FIG1, str(plan_path), "--out", str(dot_path))
    assert code == 0
    dot = dot_path.read_text()
    assert dot.startswith("digraph circulation {")
    assert dot.rstrip().endswith("}")
    assert len(re.findall(r"^\s+t\d+ \[label=", dot, re.M)) == 12
    edges = re.findall(r"^\s+t\d+ -> t\d+ \[(.*)\];$", dot, re.M)
    assert len(edges) == 12
    assert sum("style=dashed" in e for e in edges) == 3
    # edge heads/tails form one cycle over all 12 nodes
    arcs = re.findall(r"(t\d+) -> (t\d+)", dot)
    succ = dict(arcs)
    assert len(succ) == 12
    cur, seen = "t1", set()
    while cur not in seen:
        seen.add(cur)
        cur = succ[cur]
    assert len(seen) == 12


def test_diagram_two_train(tmp_path, capsys):
    tt = tmp_path / "tt.txt"
    run(capsys, "gen", "--pairs", "1", "--seed", "3", "--out", str(tt))
    inst = parse_timetable(tt.read_text())
    m = build_matrices(inst)
    from emu_roster import CirculationPlan

    plan_path = tmp_path / "plan.txt"
    plan_path.write_text(
        render_plan(CirculationPlan(order=(1, 2), maint_after=(0, 1)), inst, m)
    )
    code, out, _ = run(capsys, "diagram", str(tt), str(plan_path))
    assert code == 0
    assert len(re.findall(r"\[label=\"\d+: ", out)) == 2
    assert out.count("->") == 2
    assert out.count("style=dashed") == 1


def test_diagram_invalid_plan_exit_1(tmp_path, capsys):
    plan = tmp_path / "plan.txt"
    plan.write_text(
        "cycle\n" + "".join(
            f"pos {d} train {d} maint 1\n" for d in range(1, 13)
        )
    )
    # maintenance after every train is ineligible away from the depot
    code, _, err = run(capsys, "diagram", FIG1, str(plan))
    assert code == 1
    assert "invalid plan" in err


def test_config_file_feeds_solver(tmp_path, capsys):
    cfgf = tmp_path / "solver.cfg"
    cfgf.write_text("n_particles=5\nk_max=12\nomega2=0.0\n")
    plan_path = tmp_path / "plan.txt"
    code, out, _ = run(capsys, "solve", FIG1, "--out", str(plan_path),
                       "--config", str(cfgf), "--seed", "1")
    assert code == 0
    trace = (plan_path.parent / "plan.txt.trace.csv").read_text().splitlines()
    assert len(trace) == 14  # header + init + 12 iterations
    # omega2=0 -> objective is pure connection time (an integer value)
    values = dict(line.split(" ", 1) for line in out.splitlines())
    assert float(values["objective"]) == int(float(values["objective"]))


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    cfgf = tmp_path / "solver.cfg"
    cfgf.write_text("bogus=1\n")
    code, _, err = run(capsys, "solve", FIG1, "--out", str(tmp_path / "p.txt"),
                       "--config", str(cfgf))
    assert code == 1
    assert "unknown key" in err


def test_cli_flag_overrides_config(tmp_path, capsys):
    cfgf = tmp_path / "solver.cfg"
    cfgf.write_text("k_max=50\nn_particles=5\n")
    plan_path = tmp_path / "plan.txt"
    code, _, _ = run(capsys, "solve", FIG1, "--out", str(plan_path),
                     "--config", str(cfgf), "--iters", "7", "--seed", "1")
    assert code == 0
    trace = (plan_path.parent / "plan.txt.trace.csv").read_text().splitlines()
    assert len(trace) == 9  # header + init + 7 iterations


def test_explicit_trace_path_and_constructor_knobs(tmp_path, capsys):
    plan_path = tmp_path / "plan.txt"
    trace_path = tmp_path / "fitness.csv"
    code, _, _ = run(capsys, "solve", FIG1, "--out", str(plan_path),
                     "--trace", str(trace_path), "--particles", "5", "--iters", "8",
                     "--seed", "2", "--maint-prob", "0.9", "--max-restarts", "50")
    assert code == 0
    assert trace_path.exists()
    assert not (tmp_path / "plan.txt.trace.csv").exists()
    inst = parse_timetable(open(FIG1).read())
    plan = parse_plan(plan_path.read_text())
    assert validate(plan, inst, build_matrices(inst)).ok


def test_model_param_flags_reach_solver(tmp_path, capsys):
    plan_path = tmp_path / "plan.txt"
    code, out, _ = run(capsys, "solve", FIG1, "--out", str(plan_path),
                       "--particles", "5", "--iters", "10", "--seed", "1",
                       "--omega2", "0.0")
    assert code == 0
    values = dict(line.split(" ", 1) for line in out.splitlines())
    assert float(values["objective"]) == float(values["connection_minutes"])
