"""Operator command line: evolve, refine, augment, evaluate, report, review.

Configuration is a flat key=value file (`--config`); command-line flags win
over config values. Providers: mock (scripted from files, for offline runs),
openai_compatible, anthropic_compatible, local_http.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import evolve as evolve_mod
from . import harness, metrics, refine as refine_mod, review as review_mod
from .errors import BenchforgeError
from .llm import (
    AnthropicCompatProvider,
    Decoding,
    LlmGateway,
    LocalHTTPProvider,
    MockProvider,
    ModelSpec,
    OpenAICompatProvider,
)
from .problems import ProblemStore, load_benchmark, write_jsonl
from .sandbox import Supervisor, measure_groundtruth


def load_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    out: dict[str, str] = {}
    for raw_line in Path(path).read_text("utf-8").splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise BenchforgeError(f"config line is not key=value: {raw_line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip().strip('"')
    return out


def build_gateway(args, config: dict[str, str]) -> LlmGateway:
    providers = {}
    if args.provider == "mock":
        replies, script = {}, []
        if args.mock_replies:
            replies = json.loads(Path(args.mock_replies).read_text("utf-8"))
        if args.mock_script:
            script = json.loads(Path(args.mock_script).read_text("utf-8"))
        providers["mock"] = MockProvider(replies=replies, script=script)
    elif args.provider == "openai_compatible":
        providers["openai_compatible"] = OpenAICompatProvider(
            base_url=config.get("openai_base_url", "https://api.openai.com/v1"),
            api_key=os.environ.get(config.get("openai_api_key_env", "OPENAI_API_KEY"), ""),
        )
    elif args.provider == "anthropic_compatible":
        providers["anthropic_compatible"] = AnthropicCompatProvider(
            base_url=config.get("anthropic_base_url", "https://api.anthropic.com"),
            api_key=os.environ.get(
                config.get("anthropic_api_key_env", "ANTHROPIC_API_KEY"), ""
            ),
        )
    else:
        providers["local_http"] = LocalHTTPProvider(
            base_url=config.get("local_url", "http://localhost:8000/complete")
        )
    return LlmGateway(
        providers=providers,
        cache_dir=config.get("cache_dir"),
        min_interval_s=float(config.get("min_interval_s", "0")),
    )


def build_supervisor(args, config: dict[str, str]) -> Supervisor:
    shim_cmd = None
    raw = args.shim_cmd or config.get("shim_cmd")
    if raw:
        shim_cmd = raw.split()
    kwargs = {}
    mem_limit = args.mem_limit or int(config.get("mem_limit", "0"))
    if mem_limit:
        kwargs["memory_limit"] = mem_limit
    return Supervisor(
        shim_cmd=shim_cmd,
        workers=args.workers or int(config.get("workers", "2")),
        **kwargs,
    )


def model_spec(args) -> ModelSpec:
    return ModelSpec(
        model_id=args.model,
        kind=args.model_kind,
        provider=args.provider,
        decoding=Decoding(temperature=args.temperature, max_tokens=args.max_tokens),
    )


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--workers", type=int, default=0, help="sandbox worker slots")
    parser.add_argument("--mem-limit", type=int, default=0, help="worker memory cap, bytes")
    parser.add_argument("--tmax-ms", type=float, default=1000.0)
    parser.add_argument("--timeout-factor", type=float, default=4.0)
    parser.add_argument("--shim-cmd", help="command line of the in-sandbox runner")


def _add_model(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", required=True, help="model id for the provider")
    parser.add_argument(
        "--model-kind", choices=("base", "instruct"), default="instruct"
    )
    parser.add_argument(
        "--provider",
        choices=("mock", "openai_compatible", "anthropic_compatible", "local_http"),
        default="mock",
    )
    parser.add_argument("--temperature", type=float, default=0.0)
    parser.add_argument("--max-tokens", type=int, default=4096)
    parser.add_argument("--mock-replies", help="JSON map prompt->reply for the mock")
    parser.add_argument("--mock-script", help="JSON list of ordered mock replies")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="benchforge",
        description="Evolve program-synthesis benchmarks and evaluate solutions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="transform seed problems into a new benchmark")
    p.add_argument("--kind", required=True, choices=evolve_mod.TRANSFORMATION_KINDS)
    p.add_argument("--seeds", required=True, help="seed benchmark JSONL")
    p.add_argument("--seeds-benchmark", default="humaneval")
    p.add_argument("--ids", help="file with one seed task_id per line")
    p.add_argument("--out", required=True)
    p.add_argument("--pair-seed", type=int, default=0, help="rng seed for combine pairing")
    _add_model(p)
    _add_common(p)

    p = sub.add_parser("refine", help="run the self-consistency refinement loop")
    p.add_argument("--problems", required=True)
    p.add_argument("--benchmark", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--traces", help="JSONL audit file for refinement traces")
    p.add_argument("--max-iters", type=int, default=3)
    _add_model(p)
    _add_common(p)

    p = sub.add_parser("augment", help="grow test suites for refined problems")
    p.add_argument("--problems", required=True)
    p.add_argument("--benchmark", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--target", type=int, default=50)
    p.add_argument("--rng-seed", type=int, default=0)
    _add_model(p)
    _add_common(p)

    p = sub.add_parser("evaluate", help="generate and judge solutions")
    p.add_argument("--problems", required=True)
    p.add_argument("--benchmark", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--early-exit", action="store_true")
    p.add_argument("--parallel", type=int, default=0, help="alias for --workers")
    _add_model(p)
    _add_common(p)

    p = sub.add_parser("report", help="aggregate result files into tables")
    p.add_argument("--results", required=True, help="results/<model>/<benchmark>.jsonl")
    p.add_argument("--out-dir", default="reports")
    _add_common(p)

    p = sub.add_parser("review", help="manual examination of generated problems")
    p.add_argument("--problems", required=True)
    p.add_argument("--benchmark", required=True)
    _add_common(p)

    p = sub.add_parser("build-combine-naive", help="sequential composition dataset")
    p.add_argument("--seeds", required=True)
    p.add_argument("--seeds-benchmark", default="humaneval")
    p.add_argument("--specs", required=True, help="JSONL of {first, second, bridge_text}")
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("derive-main-only", help="strip helpers from tool_use problems")
    p.add_argument("--problems", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("decompose", help="split seeds into two sub-problems each")
    p.add_argument("--seeds", required=True)
    p.add_argument("--seeds-benchmark", default="humaneval")
    p.add_argument("--ids", required=True, help="file with one seed task_id per line")
    p.add_argument("--out", required=True)
    _add_model(p)
    _add_common(p)

    args = parser.parse_args(argv)
    config = load_config(getattr(args, "config", None))
    try:
        return _dispatch(args, config)
    except BenchforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _selected_seeds(args) -> list:
    seeds = load_benchmark(args.seeds_benchmark, args.seeds)
    if getattr(args, "ids", None):
        wanted = set(Path(args.ids).read_text("utf-8").split())
        seeds = [s for s in seeds if s.task_id in wanted]
    return seeds


def _dispatch(args, config) -> int:
    if args.command == "evolve":
        gateway = build_gateway(args, config)
        model = model_spec(args)
        seeds = _selected_seeds(args)
        drafts = []
        if args.kind == "combine":
            for a, b in evolve_mod.pair_seeds(seeds, args.pair_seed):
                drafts.append(evolve_mod.evolve_pair(a, b, model, gateway))
        else:
            for seed in seeds:
                drafts.append(evolve_mod.evolve(seed, args.kind, model, gateway))
        write_jsonl(drafts, args.out)
        print(f"wrote {len(drafts)} drafts to {args.out}")
        return 0

    if args.command == "refine":
        gateway = build_gateway(args, config)
        model = model_spec(args)
        problems = load_benchmark(args.benchmark, args.problems)
        refined, traces = [], []
        with build_supervisor(args, config) as supervisor:
            for problem in problems:
                result, trace = refine_mod.refine(
                    problem, model, gateway, supervisor, max_iters=args.max_iters
                )
                refined.append(result)
                traces.append(trace)
        write_jsonl(refined, args.out)
        if args.traces:
            refine_mod.write_traces(traces, args.traces)
        print(f"refined {len(refined)} problems to {args.out}")
        return 0

    if args.command == "augment":
        gateway = build_gateway(args, config)
        model = model_spec(args)
        problems = load_benchmark(args.benchmark, args.problems)
        out = []
        with build_supervisor(args, config) as supervisor:
            for problem in problems:
                out.append(
                    refine_mod.augment_tests(
                        problem, model, gateway, supervisor,
                        target_count=args.target, rng_seed=args.rng_seed,
                    )
                )
        write_jsonl(out, args.out)
        total = sum(len(p.test_inputs) for p in out)
        print(f"augmented {len(out)} problems ({total} tests) to {args.out}")
        return 0

    if args.command == "evaluate":
        gateway = build_gateway(args, config)
        model = model_spec(args)
        problems = load_benchmark(args.benchmark, args.problems)
        if args.parallel:
            args.workers = args.parallel
        results = []
        with build_supervisor(args, config) as supervisor:
            for problem in problems:
                policy = measure_groundtruth(
                    problem, supervisor, t_max_ms=args.tmax_ms, factor=args.timeout_factor
                )
                raw_samples = [
                    gateway.complete(model, harness.format_prompt(problem, model))
                    for _ in range(args.samples)
                ]
                results.extend(
                    harness.evaluate(
                        problem, raw_samples, supervisor,
                        model_id=args.model, policy=policy,
                        early_exit=args.early_exit,
                    )
                )
        harness.write_results(results, args.out)
        passed = sum(1 for r in results if r.passed)
        print(f"evaluated {len(results)} samples, {passed} passed; wrote {args.out}")
        return 0

    if args.command == "report":
        rows = metrics.rows_from_results_dir(args.results)
        report = metrics.build_report(rows)
        csv_path, txt_path = metrics.write_report(report, args.out_dir)
        print(f"wrote {csv_path} and {txt_path}")
        return 0

    if args.command == "review":
        problems = load_benchmark(args.benchmark, args.problems)
        store = ProblemStore()
        store.extend(problems)
        path = Path(args.problems)

        def persist(s: ProblemStore) -> None:
            write_jsonl(s.problems(args.benchmark), path)

        with build_supervisor(args, config) as supervisor:
            summary = review_mod.review(store, supervisor, persist=persist)
        print(
            f"approved {len(summary.approved)}, rejected {len(summary.rejected)}, "
            f"edited {len(summary.edited)}, skipped {len(summary.skipped)}"
        )
        return 0

    if args.command == "build-combine-naive":
        store = ProblemStore()
        store.extend(load_benchmark(args.seeds_benchmark, args.seeds))
        specs = evolve_mod.load_combine_naive_specs(args.specs)
        with build_supervisor(args, config) as supervisor:
            built = evolve_mod.build_combine_naive(store, specs, supervisor)
        write_jsonl(built, args.out)
        print(f"wrote {len(built)} composed problems to {args.out}")
        return 0

    if args.command == "derive-main-only":
        problems = load_benchmark("tool_use", args.problems)
        derived = [evolve_mod.derive_main_only(p) for p in problems]
        write_jsonl(derived, args.out)
        print(f"wrote {len(derived)} main-only problems to {args.out}")
        return 0

    if args.command == "decompose":
        gateway = build_gateway(args, config)
        model = model_spec(args)
        seeds = _selected_seeds(args)
        out = []
        for seed in seeds:
            first, second = evolve_mod.decompose(seed, model, gateway)
            out.extend([first, second])
        write_jsonl(out, args.out)
        print(f"wrote {len(out)} sub-problems to {args.out}")
        return 0

    raise BenchforgeError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    raise SystemExit(main())
