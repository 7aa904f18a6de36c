"""Count tilings of a 5x4 rectangle two ways and print one masked question."""

import time

from gridreason.harness import PromptSetting, build_prompt
from gridreason.rng import DEFAULT_SEED
from gridreason.tiling.puzzles import generate_dataset
from gridreason.tiling.solver import build_exact_cover_matrix, rect_cells, solve_tiling_dlx, solve_tiling_sat

rect = rect_cells(5, 4)
pieces = ("I", "I", "T", "T", "L")
print("exact-cover matrix:", build_exact_cover_matrix(rect, pieces).matrix.shape)

for name, solve in (("dancing links", solve_tiling_dlx), ("sat enumeration", solve_tiling_sat)):
    t0 = time.monotonic()
    sols = solve(rect, pieces)
    print(f"{name}: {len(sols)} tilings in {time.monotonic() - t0:.2f}s")

print(f"without symmetry breaking: {len(solve_tiling_dlx(rect, pieces, symmetry_breaking=False))}")

qa, stats = generate_dataset(DEFAULT_SEED)
print("instances per mask count:", dict(stats.instances))
print()
print(build_prompt(qa[0].to_json(), PromptSetting.VOT)[0]["content"])
print("gold option:", qa[0].gold_index + 1)
