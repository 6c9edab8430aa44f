"""Per-user decoding.

The structured decoders replay each scheme's recovery procedure from the
labeled cache and broadcast blocks, asserting the intermediate
mini-subfile counts the constructions promise at every stage instead of
silently succeeding.  ``OracleSession`` is the scheme-agnostic referee: it
pools every symbol a user can see into one linear system over all
N * subpacketization mini-subfile unknowns and declares a target file
decodable exactly when its unknowns are uniquely determined.
"""

from __future__ import annotations

import math

import numpy as np

from .combinatorics import binom, ksubsets, phi
from .linalg import Eliminator
from .mds import encode, erasure_decode
from .model import (BroadcastBatch, CacheContents, InvalidConfigError, Library,
                    SchemeConfig)
from .placement import (codes_for, scheme1_round_plan, subfile_block_pos,
                        _subsets_through)


class UndecodableError(Exception):
    """A user cannot recover a file; names the first failing stage."""

    def __init__(self, stage: str, detail: str = ""):
        self.stage = stage
        super().__init__(f"{stage}: {detail}" if detail else stage)


def _check_user(config: SchemeConfig, user) -> tuple[int, ...]:
    u = tuple(sorted(user))
    if u not in config.users:
        raise ValueError(f"{user} is not an r-subset of [{config.C}]")
    return u


def _assemble(config: SchemeConfig, blocks_by_pos: dict) -> np.ndarray:
    out = np.zeros(config.f, dtype=np.int64)
    L = config.block_len
    for pos in range(config.subpacketization):
        out[pos * L : (pos + 1) * L] = blocks_by_pos[pos]
    return out


def _xor_peel(config: SchemeConfig, batch: BroadcastBatch, user, demand,
              subfile_of) -> dict:
    """Recover the demanded subfiles indexed disjointly from the user.

    ``subfile_of(n, T)`` returns the (nmini, L) mini rows of any subfile
    with T intersecting the user set; interference is cancelled only from
    such already-recovered subfiles.
    """
    recovered = {}
    for rest in ksubsets(config.C, config.t):
        if set(rest) & set(user):
            continue
        big = tuple(sorted(set(user) | set(rest)))
        message = batch.message(("xor", big))
        for j, block in enumerate(message.blocks, start=1):
            acc = block.values.copy()
            own = 0
            for n, sub in block.components:
                if sub == rest:
                    own += 1
                    continue
                acc ^= subfile_of(n, sub)[j - 1]
            if own != 1:
                raise UndecodableError("xor-peel",
                                       f"message {message.name} lacks the own term")
            recovered.setdefault(rest, {})[j] = acc
    return recovered


def decode_mkr_user(config: SchemeConfig, caches: CacheContents,
                    batch: BroadcastBatch, user, demand: int) -> np.ndarray:
    """Directly cached subfiles plus one XOR peel per disjoint subfile index."""
    user = _check_user(config, user)
    got = {}
    for c in user:
        for block in caches.blocks(c):
            _, n, subset = block.key
            got[(n, subset)] = block.values
    for subset in ksubsets(config.C, config.t):
        if set(subset) & set(user):
            for n in range(1, config.N + 1):
                if (n, subset) not in got:
                    raise UndecodableError("cache", f"missing W[{n},{subset}]")

    peeled = _xor_peel(config, batch, user, demand,
                       lambda n, sub: got[(n, sub)][None, :])
    blocks_by_pos = {}
    for subset in ksubsets(config.C, config.t):
        pos = subfile_block_pos(config, subset, 1)
        if set(subset) & set(user):
            blocks_by_pos[pos] = got[(demand, subset)]
        else:
            blocks_by_pos[pos] = peeled[subset][1]
    return _assemble(config, blocks_by_pos)


def decode_corner_all(config: SchemeConfig, caches: CacheContents,
                      user) -> np.ndarray:
    """All N files from the r coded subfiles a corner-scheme user reaches."""
    user = _check_user(config, user)
    code = codes_for(config).subfile_code
    files = np.zeros((config.N, config.f), dtype=np.int64)
    for n in range(1, config.N + 1):
        positions, values = [], []
        for c in user:
            block = caches.key_map(c).get(("cw", n, c))
            if block is None:
                raise UndecodableError("cache", f"missing coded subfile ({n},{c})")
            positions.append(c - 1)
            values.append(block.values)
        minis = erasure_decode(code, positions, np.stack(values))
        files[n - 1] = minis.reshape(config.f)
    return files


def decode_scheme1_user(config: SchemeConfig, caches: CacheContents,
                        batch: BroadcastBatch, user, demand: int,
                        stats: dict | None = None) -> np.ndarray:
    """Staged recovery: round-0 accumulation, per-round parity solves, then
    XOR peeling, with the per-stage known-symbol counts asserted."""
    if config.scheme == "corner":
        return decode_corner_all(config, caches, user)[demand - 1]
    user = _check_user(config, user)
    fld = config.field
    rt = config.rtilde
    nfac = math.factorial(rt)
    code = codes_for(config).subfile_code
    plans = scheme1_round_plan(config.C, config.r, config.t)
    maps = {c: caches.key_map(c) for c in user}

    known = {}    # (n, T) -> {idx: (L,) values}, coded mini-subfiles
    decoded = {}  # (n, T) -> (rt!, L) plain mini rows
    full_y = {}   # (n, T) -> (rt!*t, L) re-encoded codeword, once decoded

    def overlap(subset) -> int:
        return len(set(subset) & set(user))

    def learn(n, subset, idx, values, stage):
        slot = known.setdefault((n, subset), {})
        if idx in slot:
            if not np.array_equal(slot[idx], values):
                raise UndecodableError(stage, f"conflicting Y[{n},{subset}]^{idx}")
            return
        slot[idx] = values

    def try_decode(n, subset, stage):
        slot = known[(n, subset)]
        if len(slot) < nfac:
            raise UndecodableError(stage, f"only {len(slot)} coded minis for "
                                          f"W[{n},{subset}]")
        idxs = sorted(slot)[:nfac]
        minis = erasure_decode(code, [i - 1 for i in idxs],
                               np.stack([slot[i] for i in idxs]))
        decoded[(n, subset)] = minis
        full_y[(n, subset)] = encode(code, minis)

    # round 0: read per-position slices from each reachable cache
    for c in user:
        for subset in _subsets_through(config, c):
            for idx in plans[0].indices(phi(c, subset)):
                for n in range(1, config.N + 1):
                    block = maps[c].get(("y", n, subset, idx))
                    if block is None:
                        raise UndecodableError("round0",
                                               f"cache {c} lacks Y[{n},{subset}]^{idx}")
                    learn(n, subset, idx, block.values, "round0")

    counts = {}
    for subset in ksubsets(config.C, config.t):
        g = overlap(subset)
        if g == 0:
            continue
        expected = math.factorial(rt - 1) * min(g, rt)
        actual = len(known[(1, subset)])
        if actual != expected:
            raise UndecodableError("round0", f"{subset}: {actual} != {expected}")
        if g >= rt:
            for n in range(1, config.N + 1):
                try_decode(n, subset, "round0")
    counts["round0"] = sum(1 for k in decoded if k[0] == 1)

    # rounds b >= 1: each reachable cache contributes one parity solve per pick
    for plan in plans[1:]:
        rcode = codes_for(config).round_codes[plan.b]
        B = rcode.k
        for c in user:
            subsets = _subsets_through(config, c)
            picks = {s: plan.indices(phi(c, s)) for s in subsets}
            for ell in range(1, plan.count + 1):
                for n in range(1, config.N + 1):
                    positions, values = [], []
                    for pos_t, s in enumerate(subsets):
                        if (n, s) in full_y:
                            positions.append(pos_t)
                            values.append(full_y[(n, s)][picks[s][ell - 1] - 1])
                    if len(positions) != plan.known_info:
                        raise UndecodableError(
                            f"round{plan.b}",
                            f"cache {c}: {len(positions)} known info symbols, "
                            f"expected {plan.known_info}")
                    for col in range(1, plan.parity_cols + 1):
                        block = maps[c].get(("q", c, n, plan.b, ell, col))
                        if block is None:
                            raise UndecodableError(f"round{plan.b}",
                                                   f"cache {c} lacks parity {col}")
                        positions.append(B + col - 1)
                        values.append(block.values)
                    info = erasure_decode(rcode, positions, np.stack(values))
                    for pos_t, s in enumerate(subsets):
                        if (n, s) not in full_y:
                            learn(n, s, picks[s][ell - 1], info[pos_t],
                                  f"round{plan.b}")
        for subset in ksubsets(config.C, config.t):
            g = overlap(subset)
            if g == 0 or (1, subset) in decoded:
                continue
            if g == rt - plan.b:
                for n in range(1, config.N + 1):
                    try_decode(n, subset, f"round{plan.b}")
            else:
                expected = nfac * g // (rt - plan.b)
                actual = len(known[(1, subset)])
                if actual != expected:
                    raise UndecodableError(f"round{plan.b}",
                                           f"{subset}: {actual} != {expected}")
        counts[f"round{plan.b}"] = sum(1 for k in decoded if k[0] == 1)

    for subset in ksubsets(config.C, config.t):
        if overlap(subset) > 0 and (demand, subset) not in decoded:
            raise UndecodableError("rounds", f"W[{demand},{subset}] not decoded")

    peeled = _xor_peel(config, batch, user, demand, lambda n, s: decoded[(n, s)])
    counts["peeled"] = len(peeled)
    if stats is not None:
        stats.update(counts)

    blocks_by_pos = {}
    for subset in ksubsets(config.C, config.t):
        base = subfile_block_pos(config, subset, 1)
        rows = (decoded[(demand, subset)] if overlap(subset) > 0
                else np.stack([peeled[subset][j] for j in range(1, nfac + 1)]))
        for j in range(nfac):
            blocks_by_pos[base + j] = rows[j]
    return _assemble(config, blocks_by_pos)


def decode_scheme2_user(config: SchemeConfig, caches: CacheContents,
                        batch: BroadcastBatch, user, demand: int) -> np.ndarray:
    """Read off-position subfiles from the broadcast; solve each accessed
    cache position from its transmitted subfiles plus cached parities."""
    user = _check_user(config, user)
    code = codes_for(config).subfile_code
    sent = {}  # (i, n) -> values
    whole_files = False
    for message in batch.messages:
        if message.key[0] == "file":
            whole_files = True
        for block in message.blocks:
            _, i, n = block.key
            sent[(i, n)] = block.values
    blocks_by_pos = {}
    if whole_files:
        for i in range(1, config.C + 1):
            if (i, demand) not in sent:
                raise UndecodableError("broadcast", f"file {demand} not broadcast")
            blocks_by_pos[i - 1] = sent[(i, demand)]
        return _assemble(config, blocks_by_pos)
    for j in range(1, config.C + 1):
        if j in user:
            continue
        if (j, demand) not in sent:
            raise UndecodableError("broadcast", f"W[{demand},{j}] not transmitted")
        blocks_by_pos[j - 1] = sent[(j, demand)]
    quota = binom(config.C - 1, config.r)
    for i in user:
        positions = [n - 1 for (ci, n) in sent if ci == i]
        values = [sent[(i, n + 1)] for n in positions]
        if len(positions) != quota:
            raise UndecodableError("broadcast",
                                   f"cache {i}: {len(positions)} subfiles "
                                   f"transmitted, expected {quota}")
        for block in caches.blocks(i):
            _, _, j = block.key
            positions.append(config.N + j - 1)
            values.append(block.values)
        column = erasure_decode(code, positions, np.stack(values))  # (N, L)
        blocks_by_pos[i - 1] = column[demand - 1]
    return _assemble(config, blocks_by_pos)


def decode_user(config: SchemeConfig, caches: CacheContents,
                batch: BroadcastBatch, user, demand: int,
                stats: dict | None = None) -> np.ndarray:
    """Run the structured decoder the config selects."""
    if config.scheme == "mkr":
        return decode_mkr_user(config, caches, batch, user, demand)
    if config.scheme in ("s1", "corner"):
        return decode_scheme1_user(config, caches, batch, user, demand, stats=stats)
    return decode_scheme2_user(config, caches, batch, user, demand)


# -- generic linear-algebra oracle ---------------------------------------------


def _block_rows(config: SchemeConfig, blocks) -> np.ndarray:
    width = config.N * config.subpacketization + config.block_len
    rows = np.zeros((len(blocks), width), dtype=np.int64)
    for i, b in enumerate(blocks):
        rows[i, : config.N * config.subpacketization] = b.coeffs
        rows[i, config.N * config.subpacketization :] = b.values
    return rows


class OracleSession:
    """Decodability referee for one user of one placement.

    The user's cache rows are eliminated once; each demand vector then only
    adds the broadcast rows on a copy, so sweeping many demand vectors stays
    cheap.  A target is decodable when all of its mini-subfile unknowns are
    uniquely determined by the accumulated system.
    """

    def __init__(self, config: SchemeConfig, caches: CacheContents, user):
        self.config = config
        self.user = _check_user(config, user)
        self.base = Eliminator(config.field,
                               config.N * config.subpacketization,
                               config.block_len)
        blocks = [b for c in self.user for b in caches.blocks(c)]
        if blocks:
            self.base.add(_block_rows(config, blocks))

    def with_batch(self, batch: BroadcastBatch | None) -> Eliminator:
        elim = self.base.copy()
        if batch is not None:
            blocks = [b for m in batch.messages for b in m.blocks]
            if blocks:
                elim.add(_block_rows(self.config, blocks))
        return elim

    def decode(self, batch: BroadcastBatch | None, target: int) -> np.ndarray:
        config = self.config
        elim = self.with_batch(batch)
        out = np.zeros(config.f, dtype=np.int64)
        L = config.block_len
        for pos in range(config.subpacketization):
            vals = elim.solve_unique(config.block_index(target, pos))
            if vals is None:
                raise UndecodableError(
                    "oracle", f"file {target} block {pos} not determined for "
                              f"user {self.user}")
            out[pos * L : (pos + 1) * L] = vals
        return out

    def decodable(self, batch: BroadcastBatch | None, target: int) -> bool:
        try:
            self.decode(batch, target)
            return True
        except UndecodableError:
            return False


def oracle_decode_user(config: SchemeConfig, caches: CacheContents,
                       batch: BroadcastBatch | None, user,
                       target: int) -> np.ndarray:
    """One-shot oracle decode of ``target`` for ``user``."""
    return OracleSession(config, caches, user).decode(batch, target)
