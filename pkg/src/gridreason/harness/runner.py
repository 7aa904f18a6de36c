"""Run every (instance, setting) pair through a provider and persist transcripts.

Layout of a run directory::

    manifest.json
    runs/<task>.<setting>.jsonl     one RunRecord per line, dataset order
    cache/                          payload-hash keyed responses

Only successful completions are written to ``runs/``, so a rerun skips
them and retries everything else. Worker threads only talk to the
provider; the calling thread is the single writer.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import httpx

from .prompts import TEMPLATE_VERSIONS, PromptSetting, build_prompt
from .provider import ChatClient, CompletionFailed, ProviderConfig

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunRecord:
    id: str
    task: str
    setting: str
    payload_hash: str
    transcript: str
    latency: float
    retries: int
    cache_hit: bool
    template_version: str
    provider: dict

    def to_json(self) -> dict:
        return asdict(self)


def load_jsonl(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def run_file(run_dir, task: str, setting: PromptSetting) -> Path:
    return Path(run_dir) / "runs" / f"{task}.{setting.value}.jsonl"


def _done_ids(path: Path) -> set[str]:
    if not path.exists():
        return set()
    done = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            try:
                done.add(json.loads(line)["id"])
            except (ValueError, KeyError):
                # a torn final line from an interrupted run
                log.warning("skipping unreadable line in %s", path)
    return done


class RateLimiter:
    def __init__(self, per_second: Optional[float]):
        self.interval = 1.0 / per_second if per_second else 0.0
        self._lock = threading.Lock()
        self._next = 0.0

    def wait(self) -> None:
        if not self.interval:
            return
        with self._lock:
            now = time.monotonic()
            delay = self._next - now
            self._next = max(now, self._next) + self.interval
        if delay > 0:
            time.sleep(delay)


@dataclass
class RunSummary:
    run_dir: Path
    manifest: dict

    @property
    def failed(self) -> int:
        return sum(c["failed"] for c in self.manifest["counts"].values())


def run_suite(
    records: Sequence[Mapping],
    settings: Iterable[PromptSetting],
    cfg: ProviderConfig,
    run_dir,
    *,
    transport: Optional[httpx.BaseTransport] = None,
    workers: int = 4,
    rate_limit: Optional[float] = None,
    use_cache: bool = True,
    limit: Optional[int] = None,
    datasets: Sequence[str] = (),
) -> RunSummary:
    """Complete every pending (instance, setting) pair.

    `limit` caps the number of new completions (useful for staged runs).
    Failed pairs are counted in the manifest and retried on the next run.
    """
    run_dir = Path(run_dir)
    (run_dir / "runs").mkdir(parents=True, exist_ok=True)
    settings = list(settings)
    limiter = RateLimiter(rate_limit)
    client = ChatClient(cfg, transport=transport, cache_dir=run_dir / "cache" if use_cache else None)
    counts: dict[str, dict] = {}
    failures: list[dict] = []
    budget = limit

    def work(item):
        rec, setting = item
        limiter.wait()
        try:
            c = client.complete(build_prompt(rec, setting))
        except CompletionFailed as e:
            return rec, setting, None, e
        return rec, setting, c, None

    tasks = list(dict.fromkeys(r["task"] for r in records))
    try:
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            for setting in settings:
                for task in tasks:
                    key = f"{task}.{setting.value}"
                    path = run_file(run_dir, task, setting)
                    done = _done_ids(path)
                    todo = [r for r in records if r["task"] == task and r["id"] not in done]
                    if budget is not None:
                        todo, budget = todo[:budget], max(0, budget - len(todo))
                    total = sum(r["task"] == task for r in records)
                    stats = counts[key] = {"total": total, "resumed": len(done), "completed": 0, "failed": 0}
                    with open(path, "a", encoding="utf-8") as out:
                        for rec, s, c, err in pool.map(work, [(r, setting) for r in todo]):
                            if err is not None:
                                stats["failed"] += 1
                                failures.append(
                                    {"id": rec["id"], "task": task, "setting": s.value, "error": str(err), "retries": err.retries}
                                )
                                continue
                            rr = RunRecord(
                                id=rec["id"],
                                task=task,
                                setting=s.value,
                                payload_hash=c.payload_hash,
                                transcript=c.text,
                                latency=round(c.latency, 6),
                                retries=c.retries,
                                cache_hit=c.cache_hit,
                                template_version=TEMPLATE_VERSIONS[task],
                                provider={"model": cfg.model, **c.meta},
                            )
                            out.write(json.dumps(rr.to_json(), ensure_ascii=False) + "\n")
                            out.flush()
                            stats["completed"] += 1
                    stats["pending"] = total - stats["resumed"] - stats["completed"]
    finally:
        client.close()
    manifest = {
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "datasets": list(datasets),
        "settings": [s.value for s in settings],
        "provider": {k: v for k, v in cfg.public().items()},
        "counts": counts,
        "failures": failures,
        "network_calls": client.network_calls,
    }
    with open(run_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, ensure_ascii=False)
    return RunSummary(run_dir, manifest)


def load_runs(run_dir) -> list[RunRecord]:
    files = sorted((Path(run_dir) / "runs").glob("*.jsonl"))
    return [RunRecord(**d) for f in files for d in load_jsonl(f)]
