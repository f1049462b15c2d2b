from __future__ import annotations

import json

import pytest

from benchforge.errors import (
    DegenerateRange,
    DomainError,
    EmptyResults,
    MissingLineage,
)
from benchforge.metrics import (
    EVOLVED_BENCHMARKS,
    ModelSuiteScores,
    build_report,
    composition_breakdown,
    decomposition_breakdown,
    fleet_tool_use_gain,
    normalized_score,
    pass_map,
    rank_scores,
    relative_drop,
    tool_use_gain,
)

from conftest import FIXTURES


def load_table2():
    return json.loads((FIXTURES / "table2_pass1.json").read_text("utf-8"))


def table2_rows():
    return [
        ModelSuiteScores(
            model=r["model"], humaneval=r["humaneval"], scores=r["scores"],
            size=r["size"], instruct=r["instruct"], humaneval_plus=r["humaneval_plus"],
        )
        for r in load_table2()["rows"]
    ]


# --- scalar ops -----------------------------------------------------------------

def test_relative_drop_flagship():
    assert relative_drop(82.3, 66.2) == pytest.approx(19.6, abs=0.05)


def test_relative_drop_zero_when_equal():
    assert relative_drop(50.0, 50.0) == 0.0


def test_relative_drop_zero_baseline():
    with pytest.raises(DomainError):
        relative_drop(0.0, 10.0)


def test_normalized_score():
    assert normalized_score(80.0, [20.0, 50.0, 80.0]) == 1.0
    assert normalized_score(20.0, [20.0, 50.0, 80.0]) == 0.0
    assert normalized_score(50.0, [20.0, 50.0, 80.0]) == pytest.approx(0.5)
    with pytest.raises(DegenerateRange):
        normalized_score(5.0, [5.0, 5.0])


def test_rank_scores_competition_style():
    ranks = rank_scores([52.0, 50.0, 50.0, 48.0, 47.0])
    assert [r.display() for r in ranks] == ["1", "*2", "*2", "4", "5"]


def test_rank_scores_tie_precision_flag():
    scores = [33.80, 33.8333]
    exact = rank_scores(scores)
    assert [r.display() for r in exact] == ["2", "1"]
    rounded = rank_scores(scores, tie_precision=0.1)
    assert [r.display() for r in rounded] == ["*1", "*1"]


def test_single_model_rank():
    assert rank_scores([66.2])[0].display() == "1"


# --- suite report against the transcription fixture --------------------------------

def test_report_reproduces_averages_and_ranks():
    data = load_table2()
    rows = table2_rows()
    report = build_report(rows)
    by_model = {m: i for i, m in enumerate(report.models)}
    for row in data["rows"]:
        i = by_model[row["model"]]
        assert report.averages[i] == pytest.approx(
            row["expected_average"], abs=0.05 + 1e-9
        ), row["model"]
        assert report.average_ranks[i].display().lstrip("*") == \
            row["expected_average_rank"].lstrip("*"), row["model"]
        for bench in ("humaneval",) + EVOLVED_BENCHMARKS:
            printed = row["humaneval_rank"] if bench == "humaneval" else row["ranks"][bench]
            assert report.ranks[bench][i].display() == printed, (row["model"], bench)


def test_fleet_drop_matches_reported():
    data = load_table2()
    report = build_report(table2_rows())
    assert report.fleet_drop == pytest.approx(data["expected_fleet_drop"], abs=0.3)
    for bench, expected in data["expected_per_benchmark_drops"].items():
        assert report.per_benchmark_drops[bench] == pytest.approx(expected, abs=0.3)


def test_report_rendering_byte_stable():
    rows = table2_rows()
    a = build_report(rows)
    b = build_report(table2_rows())
    assert a.render_csv() == b.render_csv()
    assert a.render_text() == b.render_text()
    assert a.render_csv().startswith("model,humaneval,humaneval_rank")


def test_report_normalized_scores_in_unit_range():
    report = build_report(table2_rows())
    for bench, values in report.normalized.items():
        assert all(0.0 <= v <= 1.0 for v in values)
        assert max(values) == 1.0 and min(values) == 0.0


def test_rank_invariance_under_affine_rescale():
    rows = table2_rows()
    base = build_report(rows)
    for r in rows:
        r.humaneval = r.humaneval * 2 + 5
        r.scores = {k: v * 2 + 5 for k, v in r.scores.items()}
    rescaled = build_report(rows)
    for bench in base.ranks:
        assert [x.rank for x in base.ranks[bench]] == \
            [x.rank for x in rescaled.ranks[bench]]


def test_empty_report_rejected():
    with pytest.raises(EmptyResults):
        build_report([])


# --- composition ------------------------------------------------------------------

def _composition_maps(entry):
    parents, combined, lineage = {}, {}, {}
    counter = 0
    for bucket, wins in (("pass_both", 2), ("pass_one", 1), ("pass_none", 0)):
        total = entry["parents"][bucket]
        solved = entry["solved"][bucket]
        for k in range(total):
            cid = f"C/{counter}"
            a, b = f"P/{counter}a", f"P/{counter}b"
            parents[a] = wins >= 1
            parents[b] = wins == 2
            lineage[cid] = (a, b)
            combined[cid] = k < solved
            counter += 1
    return parents, combined, lineage


@pytest.mark.parametrize("dataset", ["combine", "combine_naive"])
def test_composition_fixture_percentages(dataset):
    data = json.loads((FIXTURES / "table3_composition.json").read_text("utf-8"))
    for entry in data[dataset]:
        parents, combined, lineage = _composition_maps(entry)
        breakdown = composition_breakdown(parents, combined, lineage)
        assert breakdown.pass_both == entry["parents"]["pass_both"]
        assert breakdown.total() == len(combined)
        assert breakdown.composition_percentage == pytest.approx(
            entry["expected_pct"], abs=0.05
        ), entry["model"]


def test_composition_partition_property():
    parents = {"a": True, "b": False, "c": True, "d": True}
    combined = {"x": True, "y": False, "z": True}
    lineage = {"x": ("a", "c"), "y": ("a", "b"), "z": ("c", "d")}
    out = composition_breakdown(parents, combined, lineage)
    assert out.pass_both + out.pass_one + out.pass_none == 3
    assert out.pass_both == 2 and out.pass_one == 1


def test_composition_zero_pass_both_is_null():
    parents = {"a": False, "b": False}
    combined = {"x": True}
    out = composition_breakdown(parents, combined, {"x": ("a", "b")})
    assert out.composition_percentage is None
    assert out.pass_none == 1


def test_composition_missing_lineage():
    with pytest.raises(MissingLineage):
        composition_breakdown({}, {"x": True}, {})
    with pytest.raises(MissingLineage):
        composition_breakdown({"a": True}, {"x": True}, {"x": ("a", "gone")})


# --- decomposition ----------------------------------------------------------------

def _decomposition_maps(entry):
    seeds, subs, lineage = {}, {}, {}
    counter = 0
    for side, passed in (("pass", True), ("fail", False)):
        for bucket, wins in (("both_pass", 2), ("one_pass", 1), ("both_fail", 0)):
            for _ in range(entry[side][bucket]):
                sid = f"S/{counter}"
                a, b = f"D/{counter}_1", f"D/{counter}_2"
                seeds[sid] = passed
                subs[a] = wins >= 1
                subs[b] = wins == 2
                lineage[sid] = (a, b)
                counter += 1
    return seeds, subs, lineage


def test_decomposition_fixture_percentages():
    data = json.loads((FIXTURES / "table4_decompose.json").read_text("utf-8"))
    for entry in data["models"]:
        seeds, subs, lineage = _decomposition_maps(entry)
        assert len(seeds) == 50
        out = decomposition_breakdown(seeds, subs, lineage)
        assert out.decomp_pct == pytest.approx(entry["expected_decomp_pct"], abs=0.05)
        assert out.recomp_pct == pytest.approx(entry["expected_recomp_pct"], abs=0.05)


def test_decomposition_boundary_all_failing_seeds():
    seeds = {"s1": False, "s2": False}
    subs = {"a1": True, "a2": True, "b1": True, "b2": True}
    lineage = {"s1": ("a1", "a2"), "s2": ("b1", "b2")}
    out = decomposition_breakdown(seeds, subs, lineage)
    assert out.decomp_pct is None
    assert out.recomp_pct == 100.0


def test_decomposition_missing_lineage():
    with pytest.raises(MissingLineage):
        decomposition_breakdown({"s": True}, {}, {})


# --- tool use gain ------------------------------------------------------------------

def test_fleet_gain_fixture():
    data = json.loads((FIXTURES / "tool_use_fleet.json").read_text("utf-8"))
    rows = data["rows"]
    mo = {r["model"]: r["main_only"] for r in rows}
    tu = {r["model"]: r["tool_use"] for r in rows}
    assert fleet_tool_use_gain(mo, tu) == pytest.approx(
        data["expected"]["fleet_gain"], abs=0.5
    )
    for key, flag in (("instruct_gain", True), ("base_gain", False)):
        sub_mo = {r["model"]: r["main_only"] for r in rows if r["instruct"] == flag}
        sub_tu = {r["model"]: r["tool_use"] for r in rows if r["instruct"] == flag}
        assert fleet_tool_use_gain(sub_mo, sub_tu) == pytest.approx(
            data["expected"][key], abs=0.5
        )
    baseline = sum(mo.values()) / len(mo)
    assert baseline == pytest.approx(data["expected"]["mean_main_only"], abs=0.05)


def test_fleet_gain_identical_results_zero():
    scores = {"m1": 40.0, "m2": 10.0}
    assert fleet_tool_use_gain(scores, dict(scores)) == 0.0


def test_fleet_gain_key_mismatch():
    with pytest.raises(MissingLineage):
        fleet_tool_use_gain({"a": 1.0}, {"b": 1.0})


def test_per_problem_tool_use_gain():
    mo = {"M/1": False, "M/2": True, "M/3": False, "M/4": False}
    tu = {"T/1": True, "T/2": True, "T/3": True, "T/4": False}
    pairing = {f"M/{i}": f"T/{i}" for i in range(1, 5)}
    # mean 25% -> 75%: gain 200%
    assert tool_use_gain(mo, tu, pairing) == pytest.approx(200.0)
    with pytest.raises(MissingLineage):
        tool_use_gain(mo, tu, {"M/1": "T/9"})


def test_pass_map_folds_samples():
    class R:
        def __init__(self, task_id, passed):
            self.task_id, self.passed = task_id, passed

    records = [R("t1", False), R("t1", True), R("t2", False)]
    assert pass_map(records) == {"t1": True, "t2": False}
