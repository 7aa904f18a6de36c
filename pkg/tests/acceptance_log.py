"""Collects one pass/fail line per acceptance criterion."""

import functools

RESULTS: list[tuple[str, bool, str]] = []


def criterion(name):
    """Record the decorated test's outcome under `name`.

    The test may return a short detail string shown next to the verdict.
    """

    def wrap(fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as e:
                RESULTS.append((name, False, f"{type(e).__name__}: {str(e).splitlines()[0] if str(e) else ''}"))
                raise
            RESULTS.append((name, True, detail or ""))

        return inner

    return wrap


def lines():
    return [f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "") for name, ok, detail in RESULTS]
