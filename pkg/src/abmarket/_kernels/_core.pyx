# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernels; same contract as ``_fallback.py``."""

from libc.stdint cimport int64_t, uint64_t

NAME = "cython"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef int N_SLOTS = 6
cdef int SLOT_NEIGHBOR = 0
cdef int SLOT_MOMENTUM = 1
cdef int SLOT_GATE = 2
cdef int SLOT_COIN = 3
cdef int SLOT_NOISE = 4
cdef int SLOT_ACT = 5
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline double _uniform(uint64_t key, int64_t t, int slot) noexcept nogil:
    cdef uint64_t z = key + <uint64_t>(t * N_SLOTS + slot + 1) * GOLDEN
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    z = z ^ (z >> 31)
    return <double>(z >> 11) * INV_2_53


cdef inline int64_t _pick(double u, int64_t k) noexcept nogil:
    cdef int64_t j = <int64_t>(u * k)
    if j > k - 1:
        j = k - 1
    return j


cdef struct StepParams:
    int64_t t
    int64_t warmup
    int momentum
    double pb
    double ph
    double ps
    double p
    int algorithm
    int random_noise


cdef int _momentum_row(const double* index, int64_t t, const double* table,
                       const int64_t* lut, const int64_t* unlisted,
                       int64_t* diag, StepParams* sp) noexcept nogil:
    cdef double m1 = index[t - 1] - index[t - 2]
    cdef double m5 = index[t - 2] - index[t - 6]
    cdef double m10 = index[t - 6] - index[t - 11]
    cdef int code = ((m1 > m5) << 4) | ((m5 > m10) << 3) | ((m1 > 0) << 2) | ((m5 > 0) << 1) | (m10 > 0)
    if unlisted[code]:
        diag[0] += 1
    cdef int64_t row = lut[code]
    sp.pb = table[3 * row]
    sp.ph = table[3 * row + 1]
    sp.ps = table[3 * row + 2]
    return 0


cdef inline int64_t _decide_one(int64_t i, const int64_t* indptr, const int64_t* indices,
                                const int64_t* profile, const int64_t* state,
                                const uint64_t* keys, const int64_t* anti,
                                StepParams* sp) noexcept nogil:
    cdef int64_t jj, s_nb, s_sum = 0, s_abs = 0
    cdef int64_t lo = indptr[i], hi = indptr[i + 1]
    # branchless: states are -1/0/1, so sum and sum of squares recover the three counts
    for jj in range(lo, hi):
        s_nb = state[indices[jj]]
        s_sum += s_nb
        s_abs += s_nb * s_nb
    cdef int64_t deg = hi - lo
    cdef int64_t cb = (s_abs + s_sum) >> 1
    cdef int64_t cs = (s_abs - s_sum) >> 1
    cdef int64_t ch = deg - s_abs
    cdef int64_t prof = profile[i]
    cdef uint64_t key = keys[i]
    cdef int64_t t = sp.t
    cdef int64_t d1, d2, target, ntied, pick, seen
    cdef int64_t c[3]
    cdef int64_t order[3]
    cdef double u, w1, w2, s
    cdef int a
    order[0] = 1
    order[1] = 0
    order[2] = -1

    if (not sp.momentum) or sp.algorithm == 0:
        if deg == 0:
            d1 = state[i]
        elif prof == 2:
            d1 = order[_pick(_uniform(key, t, SLOT_NEIGHBOR), 3)]
        else:
            c[0] = cb
            c[1] = ch
            c[2] = cs
            target = c[0]
            for a in range(1, 3):
                if (prof == 0 and c[a] > target) or (prof == 1 and c[a] < target):
                    target = c[a]
            ntied = 0
            for a in range(3):
                if c[a] == target:
                    ntied += 1
            if ntied == 1:
                pick = 0
            else:
                pick = _pick(_uniform(key, t, SLOT_NEIGHBOR), ntied)
            seen = 0
            d1 = 0
            for a in range(3):
                if c[a] == target:
                    if seen == pick:
                        d1 = order[a]
                        break
                    seen += 1
        if not sp.momentum:
            return d1
        u = _uniform(key, t, SLOT_MOMENTUM)
        if u < sp.pb:
            d2 = 1
        elif u < sp.pb + sp.ph:
            d2 = 0
        else:
            d2 = -1
        if prof == 2:
            return d1
        if prof == 0:
            if d1 != d2 and _uniform(key, t, SLOT_GATE) < sp.p:
                return d2
            return d1
        if _uniform(key, t, SLOT_GATE) < sp.p:
            if _uniform(key, t, SLOT_COIN) < 0.5:
                return anti[6 * (1 - d1) + 2 * (1 - d2)]
            return anti[6 * (1 - d1) + 2 * (1 - d2) + 1]
        return d1

    if deg > 0:
        w1 = <double>(cb - cs) / <double>deg
    else:
        w1 = 0.0
    w2 = sp.pb - sp.ps
    if prof == 0:
        s = w1 + w2
    elif prof == 1:
        s = -(w1 + w2)
    elif deg > 0 and sp.random_noise:
        s = (_uniform(key, t, SLOT_NOISE) * 2.0 - 1.0) + w2
    else:
        s = 0.0 + w2
    if s > 1.0:
        return 1
    if s < -1.0:
        return -1
    if s == 0.0:
        return 0
    u = _uniform(key, t, SLOT_ACT)
    if s > 0:
        return 1 if u < s else 0
    return -1 if u < -s else 0


cdef void _fill_params(StepParams* sp, const double* index, int64_t t, int64_t warmup,
                       const double* table, const int64_t* lut,
                       const int64_t* unlisted, int64_t* diag,
                       double p, int algorithm, int random_noise) noexcept nogil:
    sp.t = t
    sp.warmup = warmup
    sp.momentum = t > warmup
    sp.p = p
    sp.algorithm = algorithm
    sp.random_noise = random_noise
    sp.pb = 0.0
    sp.ph = 0.0
    sp.ps = 0.0
    if sp.momentum:
        _momentum_row(index, t, table, lut, unlisted, diag, sp)


def decide(const int64_t[::1] indptr, const int64_t[::1] indices, const int64_t[::1] profile,
           const int64_t[::1] state, const uint64_t[::1] keys, const double[::1] index,
           int64_t t, int64_t warmup, const double[:, ::1] table, const int64_t[::1] lut,
           const int64_t[::1] unlisted, const int64_t[:, :, ::1] anti, double p,
           int algorithm, int random_noise, int64_t[::1] out, int64_t[::1] diag):
    cdef StepParams sp
    cdef Py_ssize_t i, n = profile.shape[0]
    if n == 0:
        return
    cdef const int64_t* indices_p = &indices[0] if indices.shape[0] > 0 else NULL
    with nogil:
        _fill_params(&sp, &index[0], t, warmup, &table[0, 0], &lut[0], &unlisted[0], &diag[0],
                     p, algorithm, random_noise)
        for i in range(n):
            out[i] = _decide_one(i, &indptr[0], indices_p, &profile[0], &state[0], &keys[0],
                                 &anti[0, 0, 0], &sp)


def advance(const int64_t[::1] indptr, const int64_t[::1] indices, const int64_t[::1] profile,
            int64_t[::1] state, double[::1] cash, int64_t[::1] shares, const uint64_t[::1] keys,
            double[::1] index, int64_t t0, int64_t t1, int64_t warmup,
            const double[:, ::1] table, const int64_t[::1] lut, const int64_t[::1] unlisted,
            const int64_t[:, :, ::1] anti, double p, int algorithm, int random_noise, double k,
            const int64_t[::1] tracked, double[:, ::1] wealth_hist, double[::1] prev_wealth,
            double[::1] ret_sum, double[::1] ret_sq, int64_t[::1] ret_n,
            int64_t[::1] buys, int64_t[::1] sells, int64_t[::1] forced,
            int64_t[::1] total_shares, int64_t[::1] min_shares, double[::1] min_cash,
            int64_t[::1] diag):
    cdef StepParams sp
    cdef Py_ssize_t i, j, n = profile.shape[0], n_tracked = tracked.shape[0]
    cdef int64_t t, a, nb, ns, nf, pr, sh_tot, sh_min
    cdef double c_min
    cdef double price, x, w, r
    cdef double step_sum[3]
    cdef double step_sq[3]
    cdef int64_t step_n[3]
    if n == 0 or t1 <= t0:
        return
    actions_obj = bytearray(n * 8)
    cdef int64_t[::1] actions = memoryview(actions_obj).cast("q")
    cdef const int64_t* indptr_p = &indptr[0]
    cdef const int64_t* indices_p = &indices[0] if indices.shape[0] > 0 else NULL
    cdef const int64_t* profile_p = &profile[0]
    cdef int64_t* state_p = &state[0]
    cdef const uint64_t* keys_p = &keys[0]
    cdef const int64_t* anti_p = &anti[0, 0, 0]
    cdef double* index_p = &index[0]
    cdef const double* table_p = &table[0, 0]
    cdef const int64_t* lut_p = &lut[0]
    cdef const int64_t* unlisted_p = &unlisted[0]
    cdef int64_t* diag_p = &diag[0]
    cdef int64_t* act_p = &actions[0]
    with nogil:
        for t in range(t0 + 1, t1 + 1):
            _fill_params(&sp, index_p, t, warmup, table_p, lut_p, unlisted_p, diag_p,
                         p, algorithm, random_noise)
            for i in range(n):
                act_p[i] = _decide_one(i, indptr_p, indices_p, profile_p, state_p, keys_p,
                                       anti_p, &sp)
            price = index[t - 1]
            nb = 0
            ns = 0
            nf = 0
            for i in range(n):
                a = actions[i]
                if a == 1:
                    if cash[i] >= price:
                        cash[i] -= price
                        shares[i] += 1
                        nb += 1
                    else:
                        a = 0
                        nf += 1
                elif a == -1:
                    if shares[i] >= 1:
                        cash[i] += price
                        shares[i] -= 1
                        ns += 1
                    else:
                        a = 0
                        nf += 1
                state[i] = a
            buys[t] = nb
            sells[t] = ns
            forced[t] = nf
            x = k * <double>(nb - ns) / <double>n
            if x > 0.5:
                x = 0.5
            elif x < -0.5:
                x = -0.5
            index[t] = price * (1.0 + x)
            for pr in range(3):
                step_sum[pr] = 0.0
                step_sq[pr] = 0.0
                step_n[pr] = 0
            for i in range(n):
                w = cash[i] + <double>shares[i] * index[t]
                if t > warmup and prev_wealth[i] > 0:
                    r = (w - prev_wealth[i]) / prev_wealth[i]
                    pr = profile[i]
                    step_sum[pr] += r
                    step_sq[pr] += r * r
                    step_n[pr] += 1
                prev_wealth[i] = w
            sh_tot = 0
            sh_min = shares[0]
            c_min = cash[0]
            for i in range(n):
                sh_tot += shares[i]
                if shares[i] < sh_min:
                    sh_min = shares[i]
                if cash[i] < c_min:
                    c_min = cash[i]
            total_shares[t] = sh_tot
            min_shares[t] = sh_min
            min_cash[t] = c_min
            if t > warmup:
                for pr in range(3):
                    ret_sum[pr] += step_sum[pr]
                    ret_sq[pr] += step_sq[pr]
                    ret_n[pr] += step_n[pr]
            for j in range(n_tracked):
                wealth_hist[t, j] = prev_wealth[tracked[j]]
