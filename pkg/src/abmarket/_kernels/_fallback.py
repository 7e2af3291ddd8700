"""Pure numpy implementation of the simulation kernels.

Mirrors ``_core.pyx`` operation for operation (same draws, same floating
point expression order), so both backends produce identical results.
"""

from __future__ import annotations

import numpy as np

from ..rng import (
    SLOT_ACT,
    SLOT_COIN,
    SLOT_GATE,
    SLOT_MOMENTUM,
    SLOT_NEIGHBOR,
    SLOT_NOISE,
    uniforms,
)

NAME = "python"

# column order of tallies and tie-breaks: buy, hold, sell
_ORDER = np.array([1, 0, -1], dtype=np.int64)


def _segment_counts(indptr: np.ndarray, mask: np.ndarray) -> np.ndarray:
    cs = np.zeros(len(mask) + 1, dtype=np.int64)
    np.cumsum(mask, out=cs[1:])
    return cs[indptr[1:]] - cs[indptr[:-1]]


def tallies(indptr: np.ndarray, indices: np.ndarray, state: np.ndarray) -> np.ndarray:
    """(n, 3) neighbor counts of buy, hold, sell."""
    nb = state[indices]
    return np.column_stack(
        [_segment_counts(indptr, nb == 1), _segment_counts(indptr, nb == 0), _segment_counts(indptr, nb == -1)]
    )


def momentum_row(index, t, table, lut, unlisted, diag):
    m1 = index[t - 1] - index[t - 2]
    m5 = index[t - 2] - index[t - 6]
    m10 = index[t - 6] - index[t - 11]
    code = (int(m1 > m5) << 4) | (int(m5 > m10) << 3) | (int(m1 > 0) << 2) | (int(m5 > 0) << 1) | int(m10 > 0)
    if unlisted[code]:
        diag[0] += 1
    row = lut[code]
    return float(table[row, 0]), float(table[row, 1]), float(table[row, 2])


def decide(
    indptr, indices, profile, state, keys, index, t, warmup,
    table, lut, unlisted, anti, p, algorithm, random_noise, out, diag,
):
    """Write every agent's action for step ``t`` into ``out``."""
    n = len(profile)
    counts = tallies(indptr, indices, state)
    deg = counts.sum(axis=1)
    momentum = t > warmup
    if momentum:
        pb, ph, ps = momentum_row(index, t, table, lut, unlisted, diag)

    if not momentum or algorithm == 0:
        u1 = uniforms(keys, t, SLOT_NEIGHBOR)
        target = np.where(profile == 0, counts.max(axis=1), counts.min(axis=1))
        tied = counts == target[:, None]
        ntied = tied.sum(axis=1)
        k = np.where(profile == 2, 3, ntied)
        pick = np.minimum((u1 * k).astype(np.int64), k - 1)
        rank = np.cumsum(tied, axis=1) - 1
        col = np.argmax(tied & (rank == pick[:, None]), axis=1)
        col = np.where(profile == 2, pick, col)
        d1 = np.where(deg == 0, state, _ORDER[col])
        if not momentum:
            out[:] = d1
            return
        um = uniforms(keys, t, SLOT_MOMENTUM)
        d2 = np.where(um < pb, 1, np.where(um < pb + ph, 0, -1))
        gate = uniforms(keys, t, SLOT_GATE) < p
        coin = uniforms(keys, t, SLOT_COIN) < 0.5
        opts = anti[1 - d1, 1 - d2]
        anti_act = np.where(coin, opts[:, 0], opts[:, 1])
        imit = np.where((d1 != d2) & gate, d2, d1)
        anti_side = np.where(gate, anti_act, d1)
        out[:] = np.where(profile == 0, imit, np.where(profile == 1, anti_side, d1))
        return

    w1 = np.zeros(n)
    has = deg > 0
    w1[has] = (counts[has, 0] - counts[has, 2]) / deg[has]
    w2 = pb - ps
    noise = uniforms(keys, t, SLOT_NOISE) * 2.0 - 1.0
    s_rand = np.where(has & bool(random_noise), noise + w2, 0.0 + w2)
    s = np.where(profile == 0, w1 + w2, np.where(profile == 1, -(w1 + w2), s_rand))
    ua = uniforms(keys, t, SLOT_ACT)
    frac = np.where(ua < np.abs(s), np.sign(s), 0.0).astype(np.int64)
    out[:] = np.where(s > 1.0, 1, np.where(s < -1.0, -1, np.where(s == 0.0, 0, frac)))


def execute_orders(actions, cash, shares, state, price):
    """Apply one-share orders in place; returns (buys, sells, forced_holds)."""
    want_buy = actions == 1
    want_sell = actions == -1
    buy = want_buy & (cash >= price)
    sell = want_sell & (shares >= 1)
    cash[buy] -= price
    shares[buy] += 1
    cash[sell] += price
    shares[sell] -= 1
    state[:] = np.where(buy, 1, np.where(sell, -1, 0))
    n_buy, n_sell = int(buy.sum()), int(sell.sum())
    return n_buy, n_sell, int(want_buy.sum() + want_sell.sum()) - n_buy - n_sell


def next_index(price, net, n, k):
    x = k * net / n
    if x > 0.5:
        x = 0.5
    elif x < -0.5:
        x = -0.5
    return price * (1.0 + x)


def advance(
    indptr, indices, profile, state, cash, shares, keys, index, t0, t1, warmup,
    table, lut, unlisted, anti, p, algorithm, random_noise, k,
    tracked, wealth_hist, prev_wealth, ret_sum, ret_sq, ret_n,
    buys, sells, forced, total_shares, min_shares, min_cash, diag,
):
    """Run steps ``t0 + 1 .. t1`` in place."""
    n = len(profile)
    actions = np.empty(n, dtype=np.int64)
    for t in range(t0 + 1, t1 + 1):
        decide(indptr, indices, profile, state, keys, index, t, warmup,
               table, lut, unlisted, anti, p, algorithm, random_noise, actions, diag)
        price = index[t - 1]
        nb, ns, nf = execute_orders(actions, cash, shares, state, price)
        buys[t], sells[t], forced[t] = nb, ns, nf
        index[t] = next_index(price, nb - ns, n, k)
        wealth = cash + shares * index[t]
        if t > warmup:
            ok = prev_wealth > 0
            r = (wealth[ok] - prev_wealth[ok]) / prev_wealth[ok]
            prof = profile[ok]
            ret_sum += np.bincount(prof, weights=r, minlength=3)
            ret_sq += np.bincount(prof, weights=r * r, minlength=3)
            ret_n += np.bincount(prof, minlength=3)
        prev_wealth[:] = wealth
        total_shares[t] = shares.sum()
        min_shares[t] = shares.min()
        min_cash[t] = cash.min()
        if len(tracked):
            wealth_hist[t] = wealth[tracked]
