"""Build a few navigation maps, show the planned route, then replay a wrong answer."""

from gridreason.evaluation import execute_instructions
from gridreason.grid import ASCII_PALETTE, EMOJI_PALETTE, render_grid
from gridreason.navigation import emit_nav_qa, generate_dataset, generate_maps

maps = generate_maps(4)
rec = maps[3]
print(f"{len(maps)} maps with 4 turns; showing {rec.config_id}")
print(render_grid(rec.map, ASCII_PALETTE))
print()
print(render_grid(rec.map, EMOJI_PALETTE))
print("plan:", [(d.name.lower(), n) for d, n in zip(rec.plan.directions, rec.plan.distances)])

for q in emit_nav_qa(rec)[:3]:
    print(q.kind, "given", [d.name for d in q.given_instructions], "gold", [d.name for d in q.gold])

# a model that stops one leg short still gets partial credit toward completion
short = execute_instructions(rec.map, rec.plan.directions[:-1])
print(f"short answer: executed {short.t} of {short.k} legs, reached destination: {short.reached_dest}")

_, stats = generate_dataset(range(2, 8))
for k, row in stats.items():
    print(f"k={k}: {row['maps']} maps, {row['next_step']} next-step questions")
