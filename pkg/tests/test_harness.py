import io
import math
import random

import numpy as np
import pytest

from psifb.ege import TrialRecord
from psifb.envs import BanditInstance, gen_experiment
from psifb.harness import (
    COLUMNS,
    ExperimentSpec,
    ResultRow,
    default_budgets,
    emit_csv,
    judge_trial,
    parse_algorithm,
    read_csv,
    rows_to_csv,
    run_cell,
    run_grid,
    run_trial,
)

I3 = np.array([[1.0, 0.2], [0.2, 1.0], [0.5, 0.1]])
GOLDEN_HEADER = ("instance,algorithm,metric,k,T,trials,failures,error_rate,log10_error,std_error,"
                 "mean_tau,mean_samples,mean_hv_fraction,wall_time,status,notes\n")


def test_parse_algorithm():
    assert parse_algorithm("ege-gg:3").param == 3
    assert parse_algorithm("ape-fb:c=0.1").param == ("c", 0.1)
    assert parse_algorithm("ape-fb:2.5").param == ("a", 2.5)
    assert parse_algorithm("ape-fb:c=10").notes()
    assert not parse_algorithm("ape-fb:c=1").notes()
    for bad in ("ege-xx", "ege-gg", "ege-gg:0", "ape-fb:-1", "ege-sr-k:x", "ege-sr:2"):
        with pytest.raises(ValueError):
            parse_algorithm(bad)


def test_judge_trial_examples():
    rec = TrialRecord(frozenset({0, 1}), 2, 60)
    j = judge_trial(rec, I3)
    assert j.loss == 0 and j.tau == 2 and j.samples == 60 and math.isnan(j.hv_fraction)
    assert judge_trial(TrialRecord(frozenset({0}), 2, 60), I3).loss == 1
    theta6 = gen_experiment(6).means
    assert judge_trial(TrialRecord(frozenset({1, 4, 7}), 3, 10), theta6, "psi-k", 3).loss == 0
    assert judge_trial(rec, I3, hv=True).hv_fraction == 1.0
    with pytest.raises(ValueError):
        judge_trial(rec, I3, "psi-k")


def test_csv_golden_header_and_empty(tmp_path):
    assert ",".join(COLUMNS) + "\n" == GOLDEN_HEADER
    path = tmp_path / "empty.csv"
    emit_csv([], path)
    assert path.read_text() == GOLDEN_HEADER
    assert read_csv(path) == []


def test_csv_round_trip(tmp_path):
    spec = ExperimentSpec(BanditInstance(I3, 0.3, name="i3"), ["ege-sr", "ape-fb:c=1"],
                          budgets=[30, 120], trials=40, seed=3, hv=True)
    rows = run_grid(spec)
    path = tmp_path / "rows.csv"
    emit_csv(rows, path)
    assert read_csv(path) == rows
    buf = io.StringIO()
    emit_csv(rows, buf)
    assert buf.getvalue() == path.read_text()


def test_emit_csv_reports_path(tmp_path):
    bad = tmp_path / "missing" / "x.csv"
    with pytest.raises(OSError, match="missing"):
        emit_csv([], bad)


def test_zero_noise_error_free():
    inst = gen_experiment(2).with_sigma(0.0)
    algos = ["ege-sr", "ege-sh", "ege-gg:2", "uniform", "ape-fb:c=1", "ape-fb-adapt"]
    rows = run_grid(ExperimentSpec(inst, algos, budgets=[200], trials=5))
    assert [r.status for r in rows] == ["ok"] * len(algos)
    assert all(r.failures == 0 for r in rows)
    assert all(r.log10_error == pytest.approx(math.log10(1 / 50)) for r in rows)


def test_deterministic_across_workers():
    spec = ExperimentSpec("exp:2", ["ege-sr", "ape-fb:c=1"], budgets=[120, 400], trials=60, seed=7)
    one = rows_to_csv(run_grid(spec))
    assert one == rows_to_csv(run_grid(spec))
    assert one == rows_to_csv(run_grid(spec, workers=3))


def test_shuffled_trials_same_aggregate():
    inst = gen_experiment(8)
    algo = parse_algorithm("ege-sr")
    order = list(range(200))
    random.Random(1).shuffle(order)
    opt = frozenset({4})
    failures = sum(run_trial(algo, inst, 2000, 11, s).recommended != opt for s in order)
    assert failures == run_cell(algo, inst, 2000, 200, seed=11).failures


def test_failing_cell_does_not_stop_grid():
    spec = ExperimentSpec(BanditInstance(I3, 0.3, name="i3"), ["ege-sh", "ege-sr"],
                          budgets=[4, 60], trials=10)
    rows = run_grid(spec)
    assert rows[0].status.startswith("error: InsufficientBudgetError")
    assert rows[0].failures is None and math.isnan(rows[0].error_rate)
    assert all(r.status == "ok" for r in rows[1:])


def test_grid_validation():
    with pytest.raises(ValueError):
        run_grid(ExperimentSpec("exp:8", ["ege-sr"], budgets=[3]))
    with pytest.raises(ValueError):
        run_grid(ExperimentSpec("exp:8", ["ege-sr"], trials=0))
    with pytest.raises(ValueError):
        run_grid(ExperimentSpec("exp:8", ["ege-sr"], metric="psi-k"))


def test_psi_k_metric_picks_k_from_algorithm():
    rows = run_grid(ExperimentSpec("exp:6", ["ege-sr-k:3"], budgets=[5000], trials=50, metric="psi-k"))
    assert rows[0].k == 3 and rows[0].mean_tau <= 9


def test_i3_baseline():
    rows = run_grid(ExperimentSpec(BanditInstance(I3, 0.3, name="i3"), ["ege-sr"], budgets=[2000],
                                   trials=1000))
    assert rows[0].error_rate < 0.01


def test_default_budgets():
    inst = gen_experiment(8)
    b = default_budgets(inst)
    assert b[0] == 15 and b[-1] == 237958 and len(b) == 8
    assert default_budgets(inst, t_max=10) == [15]


def test_error_rate_monotone_in_budget():
    # easy instance: error at T is at least error at 4T minus 3 standard errors
    inst = BanditInstance(I3, 0.5, name="i3")
    rows = run_grid(ExperimentSpec(inst, ["ege-sr"], budgets=[40, 160, 640], trials=1000))
    for lo, hi in zip(rows, rows[1:]):
        se = math.hypot(lo.std_error, hi.std_error)
        assert lo.error_rate >= hi.error_rate - 3 * se


def test_result_row_invariants():
    rows = run_grid(ExperimentSpec("exp:8", ["uniform"], budgets=[2000], trials=300))
    r = rows[0]
    assert isinstance(r, ResultRow)
    assert r.error_rate == r.failures / r.trials
    assert r.log10_error == pytest.approx(math.log10(max(r.error_rate, 1 / 3000)))
    assert r.wall_time is None
