"""Generate small datasets, run them through the oracle mock, and print the report.

No network access or API key is needed. Swap the transport for a real
endpoint (see ProviderConfig) to evaluate an actual model.
"""

import tempfile
from pathlib import Path

from gridreason import reports
from gridreason.harness import PromptSetting, ProviderConfig, load_runs, run_suite
from gridreason.harness.mock import oracle_transport
from gridreason.navigation import generate_dataset as nav_dataset
from gridreason.nlnav import generate_ring_dataset, generate_square_dataset
from gridreason.rng import DEFAULT_SEED
from gridreason.tiling.puzzles import generate_dataset as tiling_dataset

records = [q.to_json() for q in nav_dataset(range(2, 5))[0]]
records += [q.to_json() for q in tiling_dataset(DEFAULT_SEED)[0][:40]]
records += [x.to_json() for x in generate_square_dataset(20, DEFAULT_SEED)]
records += [x.to_json() for x in generate_ring_dataset(20, DEFAULT_SEED)]

settings = [PromptSetting.COT, PromptSetting.VOT]
cfg = ProviderConfig(endpoint="http://mock.invalid/v1", model="oracle", api_key_env="")

with tempfile.TemporaryDirectory() as tmp:
    run_dir = Path(tmp)
    summary = run_suite(records, settings, cfg, run_dir, transport=oracle_transport(records, settings))
    print("counts:", summary.manifest["counts"])
    by_id = {r["id"]: r for r in records}
    runs = load_runs(run_dir)
    scores = reports.score_runs(by_id, runs)
    rows = reports.analyze_runs(by_id, runs)
    print(reports.report_markdown(scores, rows, summary.manifest, "VoT"))
