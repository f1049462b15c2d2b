"""Aggregation of evaluation results into comparative scores and tables.

All operations here are pure functions of their inputs; rendering is
byte-stable across runs. Ranks are competition-style (ties share the best
rank and the next distinct score skips past the tied block), computed on
exact values; a tie precision can be supplied to rank on rounded scores
instead.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import DegenerateRange, DomainError, EmptyResults, MissingLineage

EVOLVED_BENCHMARKS = ("difficult", "creative", "subtle", "combine", "tool_use")
SUITE_COLUMNS = ("humaneval",) + EVOLVED_BENCHMARKS


def relative_drop(humaneval_pass: float, evolved_pass: float) -> float:
    """Percent decrease from the HumanEval score to the evolved score."""
    if humaneval_pass <= 0:
        raise DomainError("relative drop needs a positive baseline")
    return (humaneval_pass - evolved_pass) / humaneval_pass * 100.0


def normalized_score(x: float, scores_on_benchmark: Sequence[float]) -> float:
    """Position of x within the min..max span of all scores on a benchmark."""
    low, high = min(scores_on_benchmark), max(scores_on_benchmark)
    if high == low:
        raise DegenerateRange("all scores equal")
    return (x - low) / (high - low)


@dataclass(frozen=True)
class Rank:
    rank: int
    tied: bool

    def display(self) -> str:
        return f"*{self.rank}" if self.tied else str(self.rank)


def rank_scores(
    scores: Sequence[float], tie_precision: float | None = None
) -> list[Rank]:
    """Competition ranking, descending. `tie_precision` rounds before comparing."""
    if tie_precision is None:
        keys = list(scores)
    else:
        import decimal

        quantum = decimal.Decimal(str(tie_precision))
        keys = [float(decimal.Decimal(str(s)).quantize(quantum)) for s in scores]
    out = []
    for key in keys:
        better = sum(1 for other in keys if other > key)
        tied = sum(1 for other in keys if other == key) > 1
        out.append(Rank(rank=better + 1, tied=tied))
    return out


@dataclass
class ModelSuiteScores:
    """One model's pass@1 (percent) on HumanEval and the five evolved sets."""

    model: str
    humaneval: float
    scores: dict[str, float]
    size: str = "NA"
    instruct: bool = True
    humaneval_plus: float | None = None

    def evolved_average(self) -> float:
        return sum(self.scores[b] for b in EVOLVED_BENCHMARKS) / len(EVOLVED_BENCHMARKS)

    def suite_average(self) -> float:
        total = self.humaneval + sum(self.scores[b] for b in EVOLVED_BENCHMARKS)
        return total / (1 + len(EVOLVED_BENCHMARKS))


@dataclass
class BenchmarkReport:
    models: list[str]
    columns: dict[str, list[float]]  # per-benchmark scores, row-aligned
    ranks: dict[str, list[Rank]]
    averages: list[float]  # suite average incl. humaneval
    average_ranks: list[Rank]
    drops: list[float]  # per-model drop vs the evolved-only average
    fleet_drop: float
    per_benchmark_drops: dict[str, float]
    normalized: dict[str, list[float]] = field(default_factory=dict)

    def render_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["model"]
        for bench in SUITE_COLUMNS:
            header += [bench, f"{bench}_rank"]
        header += ["average", "average_rank", "drop_pct"]
        writer.writerow(header)
        for i, model in enumerate(self.models):
            row = [model]
            for bench in SUITE_COLUMNS:
                row += [repr(self.columns[bench][i]), self.ranks[bench][i].display()]
            row += [
                repr(self.averages[i]),
                self.average_ranks[i].display(),
                repr(self.drops[i]),
            ]
            writer.writerow(row)
        return buf.getvalue()

    def render_text(self) -> str:
        widths = {"model": max([5] + [len(m) for m in self.models])}
        lines = []
        head = "model".ljust(widths["model"])
        for bench in SUITE_COLUMNS:
            head += f"  {bench:>10} {'rank':>5}"
        head += f"  {'average':>8} {'rank':>5}  {'drop%':>6}"
        lines.append(head)
        lines.append("-" * len(head))
        for i, model in enumerate(self.models):
            line = model.ljust(widths["model"])
            for bench in SUITE_COLUMNS:
                line += (
                    f"  {self.columns[bench][i]:>10.1f}"
                    f" {self.ranks[bench][i].display():>5}"
                )
            line += (
                f"  {self.averages[i]:>8.1f}"
                f" {self.average_ranks[i].display():>5}"
                f"  {self.drops[i]:>6.1f}"
            )
            lines.append(line)
        lines.append("")
        lines.append(f"fleet average drop: {self.fleet_drop:.1f}%")
        for bench in EVOLVED_BENCHMARKS:
            lines.append(
                f"  {bench}: {self.per_benchmark_drops[bench]:.1f}%"
            )
        return "\n".join(lines) + "\n"


def build_report(rows: Sequence[ModelSuiteScores]) -> BenchmarkReport:
    """Scores -> ranks, suite averages, and drop statistics for the fleet."""
    if not rows:
        raise EmptyResults("no model scores to report")
    order = sorted(
        range(len(rows)), key=lambda i: (-rows[i].suite_average(), rows[i].model)
    )
    rows = [rows[i] for i in order]
    columns: dict[str, list[float]] = {"humaneval": [r.humaneval for r in rows]}
    for bench in EVOLVED_BENCHMARKS:
        columns[bench] = [r.scores[bench] for r in rows]
    ranks = {bench: rank_scores(columns[bench]) for bench in SUITE_COLUMNS}
    averages = [r.suite_average() for r in rows]
    drops = [relative_drop(r.humaneval, r.evolved_average()) for r in rows]
    per_benchmark = {
        bench: sum(
            relative_drop(r.humaneval, r.scores[bench]) for r in rows
        ) / len(rows)
        for bench in EVOLVED_BENCHMARKS
    }
    normalized = {}
    for bench in SUITE_COLUMNS:
        scores = columns[bench]
        try:
            normalized[bench] = [normalized_score(s, scores) for s in scores]
        except DegenerateRange:
            normalized[bench] = [0.0 for _ in scores]
    return BenchmarkReport(
        models=[r.model for r in rows],
        columns=columns,
        ranks=ranks,
        averages=averages,
        average_ranks=rank_scores(averages),
        drops=drops,
        fleet_drop=sum(drops) / len(drops),
        per_benchmark_drops=per_benchmark,
        normalized=normalized,
    )


# --- composition / decomposition ------------------------------------------------

@dataclass(frozen=True)
class CompositionBreakdown:
    pass_both: int
    pass_one: int
    pass_none: int
    solved_from_each: dict[str, int]
    composition_percentage: float | None

    def total(self) -> int:
        return self.pass_both + self.pass_one + self.pass_none


def composition_breakdown(
    results_parent: Mapping[str, bool],
    results_combined: Mapping[str, bool],
    lineage: Mapping[str, tuple[str, str]],
) -> CompositionBreakdown:
    """Categorize combined problems by how the model fared on their parents."""
    counts = {"pass_both": 0, "pass_one": 0, "pass_none": 0}
    solved = {"pass_both": 0, "pass_one": 0, "pass_none": 0}
    for task_id, passed in results_combined.items():
        if task_id not in lineage:
            raise MissingLineage(task_id)
        first, second = lineage[task_id]
        if first not in results_parent or second not in results_parent:
            raise MissingLineage(f"{task_id}: parents {first}, {second}")
        wins = int(results_parent[first]) + int(results_parent[second])
        bucket = ("pass_none", "pass_one", "pass_both")[wins]
        counts[bucket] += 1
        if passed:
            solved[bucket] += 1
    percentage = (
        solved["pass_both"] / counts["pass_both"] * 100.0
        if counts["pass_both"] > 0
        else None
    )
    return CompositionBreakdown(
        pass_both=counts["pass_both"],
        pass_one=counts["pass_one"],
        pass_none=counts["pass_none"],
        solved_from_each=solved,
        composition_percentage=percentage,
    )


@dataclass(frozen=True)
class DecompositionBreakdown:
    cells: dict[str, dict[str, int]]  # seed outcome -> sub-problem outcome counts
    decomp_pct: float | None
    recomp_pct: float | None


def decomposition_breakdown(
    results_seed: Mapping[str, bool],
    results_sub: Mapping[str, bool],
    lineage: Mapping[str, tuple[str, str]],
) -> DecompositionBreakdown:
    """Share of passing (resp. failing) seeds whose both halves pass."""
    cells = {
        "pass": {"both_pass": 0, "one_pass": 0, "both_fail": 0},
        "fail": {"both_pass": 0, "one_pass": 0, "both_fail": 0},
    }
    for seed_id, seed_passed in results_seed.items():
        if seed_id not in lineage:
            raise MissingLineage(seed_id)
        sub_a, sub_b = lineage[seed_id]
        if sub_a not in results_sub or sub_b not in results_sub:
            raise MissingLineage(f"{seed_id}: halves {sub_a}, {sub_b}")
        wins = int(results_sub[sub_a]) + int(results_sub[sub_b])
        bucket = ("both_fail", "one_pass", "both_pass")[wins]
        cells["pass" if seed_passed else "fail"][bucket] += 1
    passing = sum(cells["pass"].values())
    failing = sum(cells["fail"].values())
    decomp = cells["pass"]["both_pass"] / passing * 100.0 if passing else None
    recomp = cells["fail"]["both_pass"] / failing * 100.0 if failing else None
    return DecompositionBreakdown(cells=cells, decomp_pct=decomp, recomp_pct=recomp)


def tool_use_gain(
    results_main_only: Mapping[str, bool],
    results_tool_use: Mapping[str, bool],
    pairing: Mapping[str, str],
) -> float:
    """Relative improvement of the mean pass rate once helpers are shown."""
    if not pairing:
        raise MissingLineage("no main_only/tool_use pairing")
    main_only, with_helpers = [], []
    for main_id, tool_id in pairing.items():
        if main_id not in results_main_only or tool_id not in results_tool_use:
            raise MissingLineage(f"{main_id} -> {tool_id}")
        main_only.append(float(results_main_only[main_id]))
        with_helpers.append(float(results_tool_use[tool_id]))
    return fleet_tool_use_gain(
        {i: v * 100 for i, v in enumerate(main_only)},
        {i: v * 100 for i, v in enumerate(with_helpers)},
    )


def fleet_tool_use_gain(
    main_only_scores: Mapping, tool_use_scores: Mapping
) -> float:
    """Gain of mean pass@1 with helpers over mean pass@1 without."""
    if set(main_only_scores) != set(tool_use_scores):
        raise MissingLineage("main_only and tool_use cover different models")
    if not main_only_scores:
        raise MissingLineage("empty score maps")
    baseline = sum(main_only_scores.values()) / len(main_only_scores)
    helped = sum(tool_use_scores.values()) / len(tool_use_scores)
    if baseline <= 0:
        raise DomainError("tool_use gain needs a positive baseline")
    return (helped - baseline) / baseline * 100.0


# --- aggregation from result files ----------------------------------------------

def pass_map(results: Iterable) -> dict[str, bool]:
    """task_id -> passed, from EvalResult records (greedy: one sample each)."""
    out: dict[str, bool] = {}
    for r in results:
        out[r.task_id] = bool(r.passed) or out.get(r.task_id, False)
    return out


def pass_percent(results: Sequence) -> float:
    per_task = pass_map(results)
    if not per_task:
        raise EmptyResults("no evaluation records")
    return 100.0 * sum(per_task.values()) / len(per_task)


def rows_from_results_dir(results_dir: str | Path) -> list[ModelSuiteScores]:
    """results/<model>/<benchmark>.jsonl -> suite rows for every complete model."""
    from .harness import load_results

    results_dir = Path(results_dir)
    rows = []
    if not results_dir.is_dir():
        raise EmptyResults(f"{results_dir} is not a directory")
    for model_dir in sorted(p for p in results_dir.iterdir() if p.is_dir()):
        scores: dict[str, float] = {}
        for path in sorted(model_dir.glob("*.jsonl")):
            scores[path.stem] = pass_percent(load_results(path))
        if "humaneval" not in scores:
            continue
        if not all(bench in scores for bench in EVOLVED_BENCHMARKS):
            continue
        rows.append(
            ModelSuiteScores(
                model=model_dir.name,
                humaneval=scores["humaneval"],
                scores={b: scores[b] for b in EVOLVED_BENCHMARKS},
            )
        )
    if not rows:
        raise EmptyResults(f"no complete model results under {results_dir}")
    return rows


def write_report(report: BenchmarkReport, out_dir: str | Path) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "suite_scores.csv"
    txt_path = out_dir / "suite_scores.txt"
    csv_path.write_text(report.render_csv(), "utf-8")
    txt_path.write_text(report.render_text(), "utf-8")
    return csv_path, txt_path
