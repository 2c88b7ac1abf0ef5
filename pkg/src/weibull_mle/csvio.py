"""CSV emission helpers: full-precision, byte-deterministic, round-trippable.

Floats serialize with 17 significant digits so re-parsing reproduces the
in-memory doubles exactly; files use a header row, UTF-8 and LF endings.
"""

import hashlib
from pathlib import Path


def fmt(value) -> str:
    """Render one cell; floats keep 17 significant digits, ints stay integral."""
    if isinstance(value, bool):
        raise TypeError("bool is not a CSV cell type here")
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def write_csv(path, header, rows) -> int:
    """Write rows under a comma-joined header; returns the row count."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
            count += 1
    return count


def config_hash(items: dict) -> str:
    """Stable hash of a flat configuration mapping."""
    canon = "".join(f"{k}={items[k]}\n" for k in sorted(items))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()
