"""Command-line entry point: gen, run, score, analyze, report.

Exit codes: 0 success, 1 usage error, 2 some requests failed,
3 provider or configuration failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import navigation, nlnav, reports
from .grid import PALETTES, ConfigError, get_palette
from .harness.mock import canned_transport, oracle_transport
from .harness.prompts import PromptSetting
from .harness.provider import ProviderConfig
from .harness.runner import load_jsonl, load_runs, run_suite
from .tiling import puzzles

EXIT_OK, EXIT_USAGE, EXIT_PARTIAL, EXIT_PROVIDER = 0, 1, 2, 3
MAX_K = 9

log = logging.getLogger("gridreason")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_k_range(text: str) -> list[int]:
    """'2..7', '3' or '2,4,6'."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split(".."))
            ks = list(range(lo, hi + 1))
        else:
            ks = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k range {text!r}") from None
    if not ks or any(not 1 <= k <= MAX_K for k in ks):
        raise argparse.ArgumentTypeError(f"k must be within 1..{MAX_K}")
    return ks


def parse_mask_counts(text: str) -> list[int]:
    try:
        ms = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad mask counts {text!r}") from None
    if not ms or any(m not in (2, 3) for m in ms):
        raise argparse.ArgumentTypeError("mask counts must be 2 and/or 3")
    return ms


def parse_settings(text: str) -> list[PromptSetting]:
    try:
        return [PromptSetting.parse(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def parse_seed(text: str) -> int:
    try:
        seed = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed {text!r}") from None
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return seed


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


# --- gen ------------------------------------------------------------------


def _write_stats(out: Path, name: str, stats: dict, table: str) -> None:
    with open(out / f"{name}_stats.json", "w", encoding="utf-8") as fh:
        json.dump(stats, fh, indent=2, sort_keys=True)
        fh.write("\n")
    (out / f"{name}_stats.md").write_text(table, encoding="utf-8")


def nav_stats_table(stats: dict) -> str:
    ks = sorted(stats)
    head = "| | " + " | ".join(f"K={k}" for k in ks) + " |"
    rows = [head, "|---|" + "---|" * len(ks)]
    rows.append("| Route Planning | " + " | ".join(str(stats[k]["route_planning"]) for k in ks) + " |")
    rows.append("| Next Step Prediction | " + " | ".join(str(stats[k]["next_step"]) for k in ks) + " |")
    return "\n".join(rows) + "\n"


def tiling_stats_table(stats: puzzles.TilingStats) -> str:
    ms = sorted(stats.instances)
    rows = ["| Masked pieces | Configurations | Masked configurations | QA instances |", "|---|---|---|---|"]
    for m in ms:
        rows.append(f"| {m} | {stats.configurations} | {stats.masked_configurations[m]} | {stats.instances[m]} |")
    return "\n".join(rows) + "\n"


def cmd_gen(args, cfg: dict) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    palette = get_palette(getattr(args, "palette", None) or cfg.get("palette", "ascii"))
    t0 = time.monotonic()
    if args.task == "nav":
        instances, stats = navigation.generate_dataset(args.k, palette)
        navigation.write_jsonl(instances, out / "nav.jsonl")
        _write_stats(out, "nav", {str(k): v for k, v in stats.items()}, nav_stats_table(stats))
        print(nav_stats_table(stats), end="")
    elif args.task == "tiling":
        instances, stats = puzzles.generate_dataset(args.seed, args.mask_counts, palette)
        puzzles.write_jsonl(instances, out / "tiling.jsonl", palette)
        js = {
            "configurations": stats.configurations,
            "masked_configurations": stats.masked_configurations,
            "instances": stats.instances,
            "dropped": stats.dropped,
        }
        _write_stats(out, "tiling", js, tiling_stats_table(stats))
        print(tiling_stats_table(stats), end="")
    elif args.task == "nlnav":
        instances = nlnav.generate_square_dataset(args.count, args.seed)
        nlnav.write_jsonl(instances, out / "nlnav.jsonl")
        print(f"{len(instances)} square-map instances")
    else:
        instances = nlnav.generate_ring_dataset(args.count, args.seed, args.size)
        nlnav.write_jsonl(instances, out / "ring.jsonl")
        print(f"{len(instances)} ring instances (size {args.size})")
    log.info("generated %d instances in %.2fs", len(instances), time.monotonic() - t0)
    return EXIT_OK


# --- run / score / analyze / report ------------------------------------


def _load_records(paths: Sequence[str]) -> list[dict]:
    records = []
    for p in paths:
        if not Path(p).exists():
            raise UsageError(f"dataset {p} does not exist")
        records.extend(load_jsonl(p))
    ids = [r["id"] for r in records]
    if len(set(ids)) != len(ids):
        raise UsageError("dataset ids are not unique across the given files")
    return records


def cmd_run(args, cfg: dict) -> int:
    records = _load_records(args.data)
    if args.limit_instances is not None:
        by_task: dict[str, int] = {}
        kept = []
        for r in records:
            if by_task.get(r["task"], 0) < args.limit_instances:
                by_task[r["task"]] = by_task.get(r["task"], 0) + 1
                kept.append(r)
        records = kept
    settings = args.settings or parse_settings(",".join(cfg.get("settings", ["CoT", "NoViz", "VoT"])))
    pcfg = dict(cfg.get("provider", {}))
    transport = None
    if args.mock:
        pcfg.setdefault("endpoint", "http://mock.invalid/v1")
        pcfg.setdefault("model", f"mock-{args.mock}")
        pcfg["api_key_env"] = ""
        transport = oracle_transport(records, settings) if args.mock == "oracle" else canned_transport(
            "I am not sure."
        )
    provider = ProviderConfig.from_dict(pcfg)
    summary = run_suite(
        records,
        settings,
        provider,
        args.out,
        transport=transport,
        workers=args.workers or int(cfg.get("workers", 4)),
        rate_limit=cfg.get("rate_limit"),
        use_cache=not args.no_cache,
        datasets=[str(Path(p).resolve()) for p in args.data],
    )
    for key, c in summary.manifest["counts"].items():
        print(f"{key}: {c['resumed'] + c['completed']}/{c['total']} done, {c['failed']} failed")
    return EXIT_PARTIAL if summary.failed else EXIT_OK


def _run_inputs(args):
    run_dir = Path(args.run)
    manifest_path = run_dir / "manifest.json"
    if not run_dir.is_dir() or not manifest_path.exists():
        raise UsageError(f"{run_dir} is not a run directory")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    runs = load_runs(run_dir)
    if not runs:
        raise UsageError(f"{run_dir} contains no transcripts")
    records = {r["id"]: r for r in _load_records(args.data or manifest.get("datasets", []))}
    scores_dir = run_dir / "scores"
    scores_dir.mkdir(exist_ok=True)
    return run_dir, manifest, runs, records, scores_dir


def _score(runs, records, scores_dir: Path) -> dict:
    scores = reports.score_runs(records, runs)
    (scores_dir / "scores.json").write_text(json.dumps(scores, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (scores_dir / "performance.md").write_text(reports.performance_markdown(scores), encoding="utf-8")
    return scores


def _analyze(runs, records, scores_dir: Path, setting: str) -> list[dict]:
    rows = reports.analyze_runs(records, runs)
    with open(scores_dir / "analysis.jsonl", "w", encoding="utf-8") as fh:
        for r in rows:
            fh.write(json.dumps(r, ensure_ascii=False) + "\n")
    (scores_dir / "tracking.csv").write_text(reports.tracking_csv(rows), encoding="utf-8")
    (scores_dir / "tracking.md").write_text(reports.tracking_markdown(reports.tracking_table(rows)), encoding="utf-8")
    grades = reports.visualization_grades(rows, setting)
    (scores_dir / "grades.json").write_text(json.dumps(grades, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (scores_dir / "grades.md").write_text(reports.grades_markdown(grades), encoding="utf-8")
    return rows


def cmd_score(args, cfg: dict) -> int:
    _, _, runs, records, scores_dir = _run_inputs(args)
    print(reports.performance_markdown(_score(runs, records, scores_dir)), end="")
    return EXIT_OK


def cmd_analyze(args, cfg: dict) -> int:
    _, _, runs, records, scores_dir = _run_inputs(args)
    rows = _analyze(runs, records, scores_dir, args.setting)
    print(reports.tracking_csv(rows), end="")
    return EXIT_OK


def cmd_report(args, cfg: dict) -> int:
    run_dir, manifest, runs, records, scores_dir = _run_inputs(args)
    scores = _score(runs, records, scores_dir)
    rows = _analyze(runs, records, scores_dir, args.setting)
    text = reports.report_markdown(scores, rows, manifest, args.setting)
    (run_dir / "report.md").write_text(text, encoding="utf-8")
    print(f"wrote {run_dir / 'report.md'}")
    return EXIT_OK


# --- parser -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gridreason", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON config file (provider, workers, palette, settings, rate_limit)")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a dataset")
    gsub = g.add_subparsers(dest="task", required=True, parser_class=_Parser)
    for name, helptext in (
        ("nav", "visual navigation maps (route planning and next step)"),
        ("tiling", "masked-rectangle tiling questions"),
        ("nlnav", "3x3 landmark-grid walks"),
        ("ring", "ring walks"),
    ):
        t = gsub.add_parser(name, help=helptext)
        t.add_argument("--seed", type=parse_seed, required=True, help="64-bit seed (required)")
        t.add_argument("--out", default="data", help="output directory (default: data)")
        if name in ("nav", "tiling"):
            t.add_argument("--palette", choices=sorted(PALETTES), help="glyph palette (default: ascii)")
        if name == "nav":
            t.add_argument("--k", type=parse_k_range, default=parse_k_range("2..7"), help="k range, e.g. 2..7")
        if name == "tiling":
            t.add_argument("--mask-counts", type=parse_mask_counts, default=[2, 3], help="e.g. 2,3")
        if name in ("nlnav", "ring"):
            t.add_argument("--count", type=int, default=200, help="number of instances (default: 200)")
        if name == "ring":
            t.add_argument("--size", type=int, default=12, help="ring size (default: 12)")
        t.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run datasets through a provider")
    r.add_argument("--data", nargs="+", required=True, help="dataset JSONL files")
    r.add_argument("--out", required=True, help="run directory")
    r.add_argument("--settings", type=parse_settings, help="comma list of CoT,NoViz,VoT,VoTAscii")
    r.add_argument("--workers", type=int, help="concurrent requests (default: config or 4)")
    r.add_argument("--mock", choices=["oracle", "canned"], help="use an in-process provider instead of HTTP")
    r.add_argument("--no-cache", action="store_true", help="do not read or write the response cache")
    r.add_argument("--limit-instances", type=int, help="use only the first N instances of each task")
    r.set_defaults(func=cmd_run)

    for name, func, helptext in (
        ("score", cmd_score, "answer-level metrics table"),
        ("analyze", cmd_analyze, "tracking rates and visualization grades"),
        ("report", cmd_report, "score, analyze and bundle into report.md"),
    ):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--run", required=True, help="run directory")
        s.add_argument("--data", nargs="+", help="dataset JSONL files (default: those in the manifest)")
        if name != "score":
            s.add_argument("--setting", default="VoT", help="setting graded for visualizations (default: VoT)")
        s.set_defaults(func=func)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "gen" and args.task in ("nlnav", "ring") and args.count < 1:
        parser.error("--count must be positive")
    if args.command == "gen" and args.task == "ring" and args.size < 2:
        parser.error("--size must be at least 2")
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except UsageError as e:
        print(f"gridreason: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as e:
        print(f"gridreason: configuration error: {e}", file=sys.stderr)
        return EXIT_PROVIDER


if __name__ == "__main__":
    sys.exit(main())
