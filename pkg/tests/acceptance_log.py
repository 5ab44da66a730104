"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

LINES: list[str] = []


def report(number: int, title: str, ok: bool, detail: str) -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} | {detail}"
    print(line)
    LINES.append(line)
    return line
