"""On-disk formats for cache contents and broadcast batches.

Each dump is a JSON header describing every labeled block (structural key,
component terms for XOR blocks, block length) plus a little-endian binary
payload of the symbol values in header order.  Loading re-derives the
coefficient rows from the keys, so a loaded dump carries the same
machine-checkable labels as a freshly constructed one.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import (BroadcastBatch, CacheContents, LabeledBlock, Message,
                    SchemeConfig)
from .placement import coeffs_for_key


def _dtype(m: int):
    return np.dtype("<u1") if m <= 8 else np.dtype("<u2")


def _key_to_json(key: tuple):
    return [list(x) if isinstance(x, tuple) else x for x in key]


def _key_from_json(raw) -> tuple:
    return tuple(tuple(x) if isinstance(x, list) else x for x in raw)


def _components_to_json(components):
    if components is None:
        return None
    return [[n, list(subset)] for n, subset in components]


def _components_from_json(raw):
    if raw is None:
        return None
    return tuple((n, tuple(subset)) for n, subset in raw)


def _block_header(block: LabeledBlock) -> dict:
    return {"name": block.name, "key": _key_to_json(block.key),
            "components": _components_to_json(block.components),
            "len": len(block.values)}


def _block_from_header(config: SchemeConfig, header: dict,
                       values: np.ndarray) -> LabeledBlock:
    key = _key_from_json(header["key"])
    components = _components_from_json(header.get("components"))
    return LabeledBlock(name=header["name"], key=key,
                        coeffs=coeffs_for_key(config, key, components),
                        values=values, components=components)


def save_caches(caches: CacheContents, prefix) -> None:
    prefix = Path(prefix)
    config = caches.config
    header = {
        "config": config.describe(),
        "caches": [{"cache": c,
                    "symbols": sum(len(b.values) for b in caches.blocks(c)),
                    "blocks": [_block_header(b) for b in caches.blocks(c)]}
                   for c in range(1, config.C + 1)],
    }
    prefix.with_suffix(".json").write_text(json.dumps(header, indent=2) + "\n")
    payload = np.concatenate(
        [b.values for c in range(1, config.C + 1) for b in caches.blocks(c)]
        or [np.zeros(0, dtype=np.int64)])
    payload.astype(_dtype(config.m)).tofile(prefix.with_suffix(".bin"))


def load_caches(prefix) -> CacheContents:
    prefix = Path(prefix)
    header = json.loads(prefix.with_suffix(".json").read_text())
    config = SchemeConfig(**header["config"])
    raw = np.fromfile(prefix.with_suffix(".bin"),
                      dtype=_dtype(config.m)).astype(np.int64)
    offset = 0
    caches = []
    for entry in header["caches"]:
        blocks = []
        for bh in entry["blocks"]:
            values = raw[offset : offset + bh["len"]]
            offset += bh["len"]
            blocks.append(_block_from_header(config, bh, values))
        caches.append(tuple(blocks))
    return CacheContents(config=config, caches=tuple(caches))


def save_batch(batch: BroadcastBatch, prefix) -> None:
    prefix = Path(prefix)
    config = batch.config
    header = {
        "config": config.describe(),
        "messages": [{"name": m.name, "key": _key_to_json(m.key),
                      "blocks": [_block_header(b) for b in m.blocks]}
                     for m in batch.messages],
    }
    prefix.with_suffix(".json").write_text(json.dumps(header, indent=2) + "\n")
    payload = np.concatenate(
        [b.values for m in batch.messages for b in m.blocks]
        or [np.zeros(0, dtype=np.int64)])
    payload.astype(_dtype(config.m)).tofile(prefix.with_suffix(".bin"))


def load_batch(prefix) -> BroadcastBatch:
    prefix = Path(prefix)
    header = json.loads(prefix.with_suffix(".json").read_text())
    config = SchemeConfig(**header["config"])
    raw = np.fromfile(prefix.with_suffix(".bin"),
                      dtype=_dtype(config.m)).astype(np.int64)
    offset = 0
    messages = []
    for mh in header["messages"]:
        blocks = []
        for bh in mh["blocks"]:
            values = raw[offset : offset + bh["len"]]
            offset += bh["len"]
            blocks.append(_block_from_header(config, bh, values))
        messages.append(Message(name=mh["name"], key=_key_from_json(mh["key"]),
                                blocks=tuple(blocks)))
    return BroadcastBatch(config=config, messages=tuple(messages))
