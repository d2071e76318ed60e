"""Named sub-seeds derived from one master seed."""

from __future__ import annotations

import hashlib


def derive_seed(master: int, *names) -> int:
    text = ":".join([str(int(master))] + [str(n) for n in names])
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "little")
