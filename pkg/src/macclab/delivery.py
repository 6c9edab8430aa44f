"""Delivery-phase message construction and exact rate accounting.

``deliver_xor`` serves the uncoded baseline and the multi-round coded
placement alike: one XOR of plain subfiles per (t+r)-subset of caches, in
lexicographic subset order, which fixes the wire format.  ``deliver_scheme2``
broadcasts whole files when few distinct files are demanded, otherwise one
batch of binom(C-1, r) subfiles per cache position, padded
deterministically with the lowest-indexed files not already covered.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .combinatorics import binom, ksubsets
from .model import (BroadcastBatch, InvalidConfigError, LabeledBlock, Library,
                    Message, SchemeConfig, check_demands, demand_of)
from .placement import coeffs_for_key, subfile_block_pos


def _set_name(subset) -> str:
    return "{" + ",".join(map(str, subset)) + "}"


def deliver_xor(config: SchemeConfig, library: Library, demands) -> BroadcastBatch:
    """One message per (t+r)-subset S: XOR over users U inside S of the
    subfile of their demand indexed by S minus U."""
    if config.scheme not in ("mkr", "s1", "corner"):
        raise InvalidConfigError(f"xor delivery does not serve scheme {config.scheme}")
    demands = check_demands(config, demands)
    if config.scheme == "corner":  # no transmissions needed at M = N/r
        return BroadcastBatch(config=config, messages=())
    if config.t + config.r > config.C:  # no (t+r)-subsets exist
        return BroadcastBatch(config=config, messages=())
    nmini = math.factorial(config.rtilde) if config.scheme == "s1" else 1
    messages = []
    for big in ksubsets(config.C, config.t + config.r):
        users_in = ksubsets(len(big), config.r)
        components = []
        for picks in users_in:
            user = tuple(big[i - 1] for i in picks)
            rest = tuple(x for x in big if x not in user)
            components.append((demand_of(config, demands, user), rest))
        components = tuple(components)
        blocks = []
        for j in range(1, nmini + 1):
            values = np.zeros(config.block_len, dtype=np.int64)
            coeffs = coeffs_for_key(config, ("xor", big, j), components)
            for n, rest in components:
                values ^= library.block(config, n, subfile_block_pos(config, rest, j))
            blocks.append(LabeledBlock(
                name=f"X{_set_name(big)}#{j}",
                key=("xor", big, j),
                coeffs=coeffs,
                values=values,
                components=components,
            ))
        messages.append(Message(name=f"X{_set_name(big)}", key=("xor", big),
                                blocks=tuple(blocks)))
    return BroadcastBatch(config=config, messages=tuple(messages))


def scheme2_file_plan(config: SchemeConfig, demands) -> dict:
    """Which files each cache position transmits, or the whole-file set.

    With n(d) <= binom(C-1, r) distinct demands the plan is the sorted
    distinct file list; otherwise, per position i, the distinct demands of
    users avoiding cache i padded with the lowest-indexed other files up to
    binom(C-1, r), sorted by file index.
    """
    demands = check_demands(config, demands)
    quota = binom(config.C - 1, config.r)
    distinct = sorted(set(demands))
    if len(distinct) <= quota:
        return {"mode": "files", "files": distinct}
    per_cache = {}
    for i in range(1, config.C + 1):
        wanted = sorted({demand_of(config, demands, u) for u in config.users
                        if i not in u})
        pad = [n for n in range(1, config.N + 1) if n not in wanted]
        files = sorted(wanted + pad[: quota - len(wanted)])
        per_cache[i] = files
    return {"mode": "subfiles", "per_cache": per_cache}


def deliver_scheme2(config: SchemeConfig, library: Library, demands) -> BroadcastBatch:
    if config.scheme != "s2":
        raise InvalidConfigError(f"config is for scheme {config.scheme}")
    plan = scheme2_file_plan(config, demands)
    messages = []
    if plan["mode"] == "files":
        for n in plan["files"]:
            blocks = []
            for i in range(1, config.C + 1):
                key = ("sub", i, n)
                blocks.append(LabeledBlock(
                    name=f"W[{n},{i}]", key=key,
                    coeffs=coeffs_for_key(config, key),
                    values=library.block(config, n, i - 1).copy(),
                ))
            messages.append(Message(name=f"W[{n}]", key=("file", n),
                                    blocks=tuple(blocks)))
    else:
        for i in range(1, config.C + 1):
            for n in plan["per_cache"][i]:
                key = ("sub", i, n)
                block = LabeledBlock(
                    name=f"W[{n},{i}]", key=key,
                    coeffs=coeffs_for_key(config, key),
                    values=library.block(config, n, i - 1).copy(),
                )
                messages.append(Message(name=f"W[{n},{i}]", key=key,
                                        blocks=(block,)))
    return BroadcastBatch(config=config, messages=tuple(messages))


def measured_rate(batch: BroadcastBatch, f: int | None = None) -> Fraction:
    """Transmitted symbols in file units, exact."""
    if f is None:
        f = batch.config.f
    return Fraction(batch.total_symbols(), f)


def deliver(config: SchemeConfig, library: Library, demands) -> BroadcastBatch:
    """Run the delivery phase the config selects."""
    if config.scheme == "s2":
        return deliver_scheme2(config, library, demands)
    return deliver_xor(config, library, demands)
