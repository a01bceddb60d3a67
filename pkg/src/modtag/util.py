"""Small shared helpers: atomic file writes, half-up rounding, file digests."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from decimal import ROUND_HALF_UP, Decimal


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file + rename so readers never see partial output."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def round_half_up(value: float, ndigits: int) -> float:
    """Decimal half-up rounding (float round() is banker's rounding)."""
    q = Decimal(1).scaleb(-ndigits)
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))


def ratio_percent(numerator: int, denominator: int, ndigits: int = 2) -> float:
    """Exact percentage of an integer ratio, rounded half-up."""
    q = Decimal(1).scaleb(-ndigits)
    pct = Decimal(numerator) * 100 / Decimal(denominator)
    return float(pct.quantize(q, rounding=ROUND_HALF_UP))


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()
