"""Aggregate run records into score, tracking and visualization-grade tables."""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from types import SimpleNamespace
from typing import Mapping, Optional, Sequence

from .evaluation import aggregate, percent
from .harness.prompts import PromptSetting
from .harness.runner import RunRecord
from .scoring import TASKS, score_record
from .traces import NAV_TASKS, TILING_TASKS, grade_last_visualization, parse_transcript, tracking_rates

TASK_TITLES = {
    "route_planning": "Route Planning",
    "next_step": "Next Step Prediction",
    "tiling": "Visual Tiling",
    "nlnav": "Natural Language Navigation",
    "ring": "Ring Navigation",
}


def _fmt(x: Optional[float]) -> str:
    return "n/a" if x is None else f"{x:.2f}"


def _join(records: Mapping[str, Mapping], runs: Sequence[RunRecord]):
    for rr in runs:
        rec = records.get(rr.id)
        if rec is None:
            raise KeyError(f"run record {rr.id!r} has no dataset record")
        yield rec, rr


def score_runs(records: Mapping[str, Mapping], runs: Sequence[RunRecord]) -> dict:
    """{setting: {task: metric json}} over every task present."""
    groups: dict[tuple[str, str], list] = {}
    for rec, rr in _join(records, runs):
        s = score_record(rec, rr.transcript)
        groups.setdefault((rr.setting, rec["task"]), []).append(s.trace if s.trace is not None else s.judgment)
    out: dict[str, dict] = {}
    for (setting, task), items in sorted(groups.items()):
        out.setdefault(setting, {})[task] = aggregate(items, task).to_json()
    return out


def performance_markdown(scores: Mapping[str, Mapping]) -> str:
    settings = [s.value for s in PromptSetting if s.value in scores]
    lines = [
        "| Settings | Route Planning: Completing Rate | Route Planning: Succ Rate "
        "| Next Step Prediction | Visual Tiling | Natural-Language Navigation |",
        "|---|---|---|---|---|---|",
    ]
    for s in settings:
        row = scores[s]

        def get(task, key):
            return _fmt(row[task][key]) if task in row else "/"

        lines.append(
            f"| {s} | {get('route_planning', 'completing_rate')} | {get('route_planning', 'success_rate')} "
            f"| {get('next_step', 'accuracy')} | {get('tiling', 'accuracy')} | {get('nlnav', 'accuracy')} |"
        )
    if any("ring" in scores[s] for s in settings):
        lines += ["", "| Settings | Ring Navigation |", "|---|---|"]
        for s in settings:
            lines.append(f"| {s} | {_fmt(scores[s]['ring']['accuracy']) if 'ring' in scores[s] else '/'} |")
    return "\n".join(lines) + "\n"


def analyze_runs(records: Mapping[str, Mapping], runs: Sequence[RunRecord]) -> list[dict]:
    """One analysis row per transcript."""
    rows = []
    for rec, rr in _join(records, runs):
        tr = parse_transcript(rr.transcript, rec)
        judgment = score_record(rec, rr.transcript).judgment
        grade = None
        if rec["task"] in NAV_TASKS + TILING_TASKS:
            grade = grade_last_visualization(tr, rec, judgment)
        rows.append(
            {
                "id": rr.id,
                "task": rec["task"],
                "setting": rr.setting,
                "l_s": tr.l_s,
                "l_v": tr.l_v,
                "complete": tr.complete,
                "partial": tr.partial,
                "graded": grade is not None,
                "compliant": None if grade is None else grade.compliant,
                "accurate": None if grade is None else grade.accurate,
                "reasons": [] if grade is None else grade.reasons,
                "answer_correct": judgment.correct,
            }
        )
    return rows


def tracking_table(rows: Sequence[Mapping]) -> list[dict]:
    groups: dict[tuple[str, str], list] = {}
    for r in rows:
        groups.setdefault((r["task"], r["setting"]), []).append(r)
    out = []
    order = {s.value: i for i, s in enumerate(PromptSetting)}
    for (task, setting), rs in sorted(groups.items(), key=lambda kv: (TASKS.index(kv[0][0]), order[kv[0][1]])):
        complete, partial = tracking_rates([SimpleNamespace(**r) for r in rs])
        out.append(
            {
                "task": task,
                "setting": setting,
                "n": len(rs),
                "complete_tracking": percent(complete),
                "partial_tracking": percent(partial),
            }
        )
    return out


def tracking_csv(rows: Sequence[Mapping]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(
        buf, fieldnames=["task", "setting", "n", "complete_tracking", "partial_tracking"], lineterminator="\n"
    )
    w.writeheader()
    w.writerows(tracking_table(rows))
    return buf.getvalue()


def visualization_grades(rows: Sequence[Mapping], setting: str = "VoT") -> dict:
    """Compliance, accuracy and spatial-understanding accuracy per task family.

    Compliance and accuracy are over all transcripts of the family; one
    without a visualization before its answer counts as neither.
    """
    families = {"Visual Navigation": NAV_TASKS, "Visual Tiling": TILING_TASKS}
    out = {}
    for name, tasks in families.items():
        rs = [r for r in rows if r["task"] in tasks and r["setting"] == setting]
        if not rs:
            continue
        n = len(rs)
        accurate = [r for r in rs if r["accurate"]]
        su = Fraction(sum(r["answer_correct"] for r in accurate), len(accurate)) if accurate else None
        out[name] = {
            "n": n,
            "graded": sum(r["graded"] for r in rs),
            "compliance": percent(Fraction(sum(bool(r["compliant"]) for r in rs), n)),
            "accuracy": percent(Fraction(len(accurate), n)),
            "spatial_understanding": None if su is None else percent(su),
            "disagreements": sum("language_visualization_disagreement" in r["reasons"] for r in rs),
        }
    return out


def grades_markdown(grades: Mapping[str, Mapping]) -> str:
    lines = [
        "| Task | Spatial Visualization: Compliance | Spatial Visualization: Accuracy | Spatial Understanding: Accuracy |",
        "|---|---|---|---|",
    ]
    for name, g in grades.items():
        lines.append(f"| {name} | {_fmt(g['compliance'])} | {_fmt(g['accuracy'])} | {_fmt(g['spatial_understanding'])} |")
    return "\n".join(lines) + "\n"


def tracking_markdown(table: Sequence[Mapping]) -> str:
    lines = ["| Task | Setting | n | Complete Tracking | Partial Tracking |", "|---|---|---|---|---|"]
    for r in table:
        lines.append(
            f"| {TASK_TITLES[r['task']]} | {r['setting']} | {r['n']} "
            f"| {_fmt(r['complete_tracking'])} | {_fmt(r['partial_tracking'])} |"
        )
    return "\n".join(lines) + "\n"


def report_markdown(
    scores: Mapping, rows: Sequence[Mapping], manifest: Optional[Mapping] = None, setting: str = "VoT"
) -> str:
    parts = ["# Evaluation report", ""]
    if manifest:
        parts += [
            f"Model: `{manifest.get('provider', {}).get('model', '?')}`. "
            f"Settings: {', '.join(manifest.get('settings', []))}. "
            f"Failed requests: {len(manifest.get('failures', []))}.",
            "",
        ]
    parts += ["## Task performance", "", performance_markdown(scores)]
    parts += ["## Visual state tracking", "", tracking_markdown(tracking_table(rows))]
    grades = visualization_grades(rows, setting)
    parts += [f"## Spatial visualization and understanding ({setting})", ""]
    parts += [grades_markdown(grades) if grades else "No graded transcripts for this setting.\n"]
    return "\n".join(parts)
