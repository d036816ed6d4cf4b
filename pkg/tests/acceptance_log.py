"""Collects one verdict line per acceptance criterion for the run summary."""

RESULTS = {}


def record(num: int, name: str, passed: bool, detail: str = "") -> bool:
    RESULTS[num] = (name, bool(passed), detail)
    return bool(passed)


def lines():
    out = []
    for num in sorted(RESULTS):
        name, ok, detail = RESULTS[num]
        out.append(f"{'PASS' if ok else 'FAIL'} criterion {num:2d} {name}: {detail}")
    return out
