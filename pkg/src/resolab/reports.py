"""Deterministic text emission: key=value files and CSV rows.

Floats are written with 17 significant digits, which round-trips every double
exactly; reruns with the same config therefore produce identical bytes.
"""

from __future__ import annotations

from pathlib import Path


def format_float(x: float) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.17g}"


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def write_keyvalues(path, items: dict) -> None:
    lines = [f"{k}={format_value(v)}" for k, v in items.items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def keyvalue_lines(items: dict) -> str:
    return "\n".join(f"{k}={format_value(v)}" for k, v in items.items())


def read_keyvalue_lines(path) -> list[tuple[int, str, str]]:
    """(line_no, key, value) triples; blank lines and # comments skipped."""
    from .errors import ConfigError

    out = []
    for no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {raw!r}", line_no=no)
        key, _, value = line.partition("=")
        out.append((no, key.strip(), value.strip()))
    return out


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")
