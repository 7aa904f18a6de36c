"""In-process providers speaking the chat-completions wire format.

`oracle_transcript` writes the reply a perfect model would give: one
visualization after every reasoning step, then "The answer is ...".
"""

from __future__ import annotations

import itertools
import json
from typing import Callable, Iterable, Mapping, Optional

import httpx

from ..evaluation import turning_indices
from ..nlnav import GRID_SIDE, SNAKE
from ..traces import nav_state, render_nav_state, render_tiling_state, palette_for
from .prompts import PromptSetting, build_prompt


def chat_response(text: str, model: str = "mock") -> dict:
    return {
        "id": "mock-0",
        "object": "chat.completion",
        "model": model,
        "choices": [{"index": 0, "message": {"role": "assistant", "content": text}, "finish_reason": "stop"}],
        "usage": {"prompt_tokens": 0, "completion_tokens": 0, "total_tokens": 0},
    }


def reply_transport(reply: Callable[[list[dict]], str]) -> httpx.MockTransport:
    """Transport answering every request with `reply(messages)`."""

    def handler(request: httpx.Request) -> httpx.Response:
        body = json.loads(request.content)
        return httpx.Response(200, json=chat_response(reply(body["messages"]), body.get("model", "mock")))

    return httpx.MockTransport(handler)


def canned_transport(text: str) -> httpx.MockTransport:
    return reply_transport(lambda _: text)


def scripted_transport(statuses: Iterable[int], text: str) -> httpx.MockTransport:
    """Return the given HTTP statuses in turn (with `text` on 200), then 200 forever."""
    it = iter(statuses)
    calls = {"n": 0}

    def handler(request: httpx.Request) -> httpx.Response:
        calls["n"] += 1
        status = next(it, 200)
        if status == 200:
            return httpx.Response(200, json=chat_response(text))
        return httpx.Response(status, json={"error": {"message": "scripted"}})

    t = httpx.MockTransport(handler)
    t.calls = calls
    return t


# --- oracle -------------------------------------------------------------


def _nav_oracle(record: Mapping) -> list[str]:
    palette = palette_for(record)
    m, visited, current = nav_state(record)
    dirs = record["gold"] if record["task"] == "route_planning" else record["given_instructions"]
    out = []
    for i, (d, end) in enumerate(zip(dirs, turning_indices(visited)), 1):
        out.append(f"Step {i}: move {d} along the road.")
        out.append(render_nav_state(m, palette, visited[: end + 1], visited[end]))
    if record["task"] == "next_step":
        out.append(f"Step {len(dirs) + 1}: from the current position the road continues {record['gold'][0]}.")
        out.append(render_nav_state(m, palette, visited, current))
        out.append(f"The answer is {record['gold'][0]}.")
    else:
        out.append("The answer is " + ", ".join(record["gold"]) + ".")
    return out


def _tiling_oracle(record: Mapping) -> list[str]:
    names = list(record["masked_pieces"])
    q = record["query_piece"]
    order = [n for n in names if n != q] + [q]
    out = []
    for i in range(1, len(order) + 1):
        out.append(f"Step {i}: place tetromino {order[i - 1]} into the empty cells.")
        out.append(render_tiling_state(record, order[:i]))
    out.append(f"The answer is {record['gold']}.")
    return out


def _square_grid(pos) -> str:
    return "\n".join(
        "".join("x" if (r, c) == tuple(pos) else "o" for c in range(GRID_SIDE)) for r in range(GRID_SIDE)
    )


def _nlnav_oracle(record: Mapping) -> list[str]:
    positions = {name: pos for name, (pos, _) in zip(record["landmarks"], SNAKE)}
    pos = positions[record["start_object"]]
    out = []
    for i, d in enumerate(record["instructions"], 1):
        dr, dc = {"up": (-1, 0), "down": (1, 0), "left": (0, -1), "right": (0, 1)}[d]
        pos = (pos[0] + dr, pos[1] + dc)
        out.append(f"Step {i}: go {d} by one step.")
        out.append(_square_grid(pos))
    out.append(f"The answer is {record['gold_object']}.")
    return out


def _ring_grid(index: int, size: int) -> str:
    # clockwise positions laid out as a loop over two rows
    half = (size + 1) // 2
    top = [i for i in range(half)]
    bottom = [i for i in range(size - 1, half - 1, -1)]
    bottom += [None] * (len(top) - len(bottom))

    def glyph(i):
        return "-" if i is None else ("x" if i == index else "o")

    return "".join(glyph(i) for i in top) + "\n" + "".join(glyph(i) for i in bottom)


def _ring_oracle(record: Mapping) -> list[str]:
    size = record["ring_size"]
    idx = record["start_index"]
    out = []
    for i, (direction, n) in enumerate(record["moves"], 1):
        idx = (idx + (n if direction == "clockwise" else -n)) % size
        out.append(f"Step {i}: go {n} steps {direction}.")
        out.append(_ring_grid(idx, size))
    out.append(f"The answer is {record['gold_object']}.")
    return out


_ORACLES = {
    "route_planning": _nav_oracle,
    "next_step": _nav_oracle,
    "tiling": _tiling_oracle,
    "nlnav": _nlnav_oracle,
    "ring": _ring_oracle,
}


def oracle_transcript(record: Mapping) -> str:
    return "\n".join(_ORACLES[record["task"]](record)) + "\n"


def oracle_transport(records: Iterable[Mapping], settings: Optional[Iterable[PromptSetting]] = None) -> httpx.MockTransport:
    """A provider that recognizes each prompt and answers it perfectly."""
    records = list(records)
    settings = list(settings or PromptSetting)
    table = {}
    for rec, s in itertools.product(records, settings):
        table[build_prompt(rec, s)[0]["content"]] = rec

    def reply(messages: list[dict]) -> str:
        rec = table.get(messages[-1]["content"])
        if rec is None:
            return "I do not know."
        return oracle_transcript(rec)

    return reply_transport(reply)
