#!/usr/bin/env python3
"""Regenerates src/collision_tables.cpp from the known two-block collision pair.

The search engine follows one fixed differential family per block (message-word
deltas +/-2^31 on words 4 and 14, +/-2^15 on word 11).  This script replays the
known colliding pair through the compression function, derives a sufficient
bit-condition system (pins, two-bit relations, three-way parities) for the
first 16 state words, locates tunnel bits, and emits everything as C++ tables.

Run from the repository root:  python3 tools/gen_tables.py > src/collision_tables.cpp
"""

import sys

M = 0xFFFFFFFF
IV = (0x67452301, 0xEFCDAB89, 0x98BADCFE, 0x10325476)

AC = [int(abs(__import__('math').sin(i + 1)) * 2**32) & M for i in range(64)]
RC = ([7, 12, 17, 22] * 4 + [5, 9, 14, 20] * 4 + [4, 11, 16, 23] * 4 +
      [6, 10, 15, 21] * 4)
WT = ([i for i in range(16)] + [(5 * i + 1) % 16 for i in range(16, 32)] +
      [(3 * i + 5) % 16 for i in range(32, 48)] + [(7 * i) % 16 for i in range(48, 64)])

PAIR_A = bytes.fromhex(
    "d131dd02c5e6eec4693d9a0698aff95c2fcab58712467eab4004583eb8fb7f89"
    "55ad340609f4b30283e488832571415a085125e8f7cdc99fd91dbdf280373c5b"
    "d8823e3156348f5bae6dacd436c919c6dd53e2b487da03fd02396306d248cda0"
    "e99f33420f577ee8ce54b67080a80d1ec69821bcb6a8839396f9652b6ff72a70")
PAIR_B = bytes.fromhex(
    "d131dd02c5e6eec4693d9a0698aff95c2fcab50712467eab4004583eb8fb7f89"
    "55ad340609f4b30283e4888325f1415a085125e8f7cdc99fd91dbd7280373c5b"
    "d8823e3156348f5bae6dacd436c919c6dd53e23487da03fd02396306d248cda0"
    "e99f33420f577ee8ce54b67080280d1ec69821bcb6a8839396f965ab6ff72a70")


def rl(x, s):
    return ((x << s) | (x >> (32 - s))) & M


def rr(x, s):
    return rl(x, 32 - s)


def f_t(t, x, y, z):
    if t < 16:
        return (x & y) | (~x & z) & M
    if t < 32:
        return (x & z) | (y & ~z) & M
    if t < 48:
        return x ^ y ^ z
    return (y ^ (x | (~z & M))) & M


def words_of(block):
    return [int.from_bytes(block[4 * i:4 * i + 4], 'little') for i in range(16)]


def qx(i):
    return i + 3      # Q array index for state word Q_i, i in [-3, 64]


def compress_trace(ihv, m):
    """Returns (output ihv, Q[0..67], T[0..63]) with Q[qx(i)] = Q_i."""
    Q = [0] * 68
    Q[qx(-3)], Q[qx(-2)], Q[qx(-1)], Q[qx(0)] = ihv[0], ihv[3], ihv[2], ihv[1]
    T = [0] * 64
    for t in range(64):
        i = t + 1
        T[t] = (f_t(t, Q[qx(i - 1)], Q[qx(i - 2)], Q[qx(i - 3)]) +
                Q[qx(i - 4)] + AC[t] + m[WT[t]]) & M
        Q[qx(i)] = (Q[qx(i - 1)] + rl(T[t], RC[t])) & M
    out = ((ihv[0] + Q[qx(61)]) & M, (ihv[1] + Q[qx(64)]) & M,
           (ihv[2] + Q[qx(63)]) & M, (ihv[3] + Q[qx(62)]) & M)
    return out, Q, T


def bit(x, j):
    return (x >> j) & 1


class Derivation:
    """Bit-condition system for one block of the pair, read off the traces."""

    def __init__(self, ihv, ihvp, m, mp):
        self.ihv, self.ihvp, self.m, self.mp = ihv, ihvp, m, mp
        self.out, self.Q, self.T = compress_trace(ihv, m)
        self.outp, self.Qp, self.Tp = compress_trace(ihvp, mp)
        self.dm = [(mp[i] - m[i]) & M for i in range(16)]
        self.pin = {}      # (i, j) -> v           Q_i bit j fixed
        self.rel = {}      # (i, j) -> (dep, c)    Q_i[j] == Q_{i-dep}[j] ^ c
        self.x3 = {}       # (i, j) -> c           Q_i[j]^Q_{i-1}[j]^Q_{i-2}[j] == c
        self.iv_pin = []   # (i, j, v) on ihv-held words (i < 1)
        self.iv_rel = []   # (hi, lo, j, c) both on ihv words
        self.iv_link = []  # (hi, lo, j, c): Q_hi[j] == w[lo][j] ^ c, hi >= 1

    def xq(self, i):
        return self.Q[qx(i)] ^ self.Qp[qx(i)]

    def add_pin(self, i, j, v):
        if i < 1:
            if (i, j, v) not in self.iv_pin:
                assert bit(self.Q[qx(i)], j) == v
                self.iv_pin.append((i, j, v))
            return
        assert bit(self.Q[qx(i)], j) == v, (i, j, v)
        assert self.pin.get((i, j), v) == v, (i, j)
        self.pin[(i, j)] = v

    def add_rel(self, hi, lo, j, c):
        if lo < 1 and hi < 1:
            if (hi, lo, j, c) not in self.iv_rel:
                self.iv_rel.append((hi, lo, j, c))
            return
        if lo < 1:
            if (hi, lo, j, c) not in self.iv_link:
                assert bit(self.Q[qx(hi)], j) ^ bit(self.Q[qx(lo)], j) == c
                self.iv_link.append((hi, lo, j, c))
            return
        assert bit(self.Q[qx(hi)], j) ^ bit(self.Q[qx(lo)], j) == c
        dep = hi - lo
        assert dep in (1, 2)
        prev = self.rel.get((hi, j))
        if prev is not None and prev != (dep, c):
            # conflicting relations force both bits: resolve via pins
            self.add_pin(hi, j, bit(self.Q[qx(hi)], j))
            self.add_pin(hi - prev[0], j, bit(self.Q[qx(hi - prev[0])], j))
            self.add_pin(lo, j, bit(self.Q[qx(lo)], j))
            return
        self.rel[(hi, j)] = (dep, c)

    def add_x3(self, i, j, c):
        assert (bit(self.Q[qx(i)], j) ^ bit(self.Q[qx(i - 1)], j) ^
                bit(self.Q[qx(i - 2)], j)) == c
        self.x3[(i, j)] = c

    def difference_pins(self):
        # Bits that differ between the sides are fixed to the realized values
        # (below the MSB, where the carry sign matters).
        for i in range(1, 65):
            x = self.xq(i)
            for j in range(31):
                if bit(x, j):
                    self.add_pin(i, j, bit(self.Q[qx(i)], j))

    def f_conditions(self):
        for t in range(64):
            xi, yi, zi = t, t - 1, t - 2
            Xs = (self.xq(xi), self.xq(yi), self.xq(zi))
            if not (Xs[0] | Xs[1] | Xs[2]):
                continue
            fv = f_t(t, self.Q[qx(xi)], self.Q[qx(yi)], self.Q[qx(zi)])
            fvp = f_t(t, self.Qp[qx(xi)], self.Qp[qx(yi)], self.Qp[qx(zi)])
            for j in range(32):
                S = (bit(Xs[0], j), bit(Xs[1], j), bit(Xs[2], j))
                if S == (0, 0, 0):
                    continue
                need = bit(fv ^ fvp, j)
                fj = bit(fv, j)
                # Allowed input combinations.  At difference bits below the
                # MSB the ordered output pair must match the realization so
                # the arithmetic sign of the flip is fixed.
                V = []
                for v in range(8):
                    x, y, z = bit(v, 2), bit(v, 1), bit(v, 0)
                    o = bit(f_t(t, x << j, y << j, z << j), j)
                    op = bit(f_t(t, (x ^ S[0]) << j, (y ^ S[1]) << j,
                                 (z ^ S[2]) << j), j)
                    if (o ^ op) == need and (need == 0 or j == 31 or o == fj):
                        V.append((x, y, z))
                here = (bit(self.Q[qx(xi)], j), bit(self.Q[qx(yi)], j),
                        bit(self.Q[qx(zi)], j))
                assert here in V, (t, j)
                self.encode(j, V, xi, yi, zi)

    def encode(self, j, V, xi, yi, zi):
        if len(V) == 8:
            return
        Vs = set(V)
        conds = []
        pinned = set()
        for pos in range(3):
            vals = {v[pos] for v in Vs}
            if len(vals) == 1:
                conds.append(('pin', pos, vals.pop()))
                pinned.add(pos)
        for p1, p2 in ((0, 1), (0, 2), (1, 2)):
            if p1 in pinned or p2 in pinned:
                continue
            xors = {v[p1] ^ v[p2] for v in Vs}
            if len(xors) == 1:
                conds.append(('rel', p1, p2, xors.pop()))
        if not conds:
            pars = {v[0] ^ v[1] ^ v[2] for v in Vs}
            if len(pars) == 1:
                conds.append(('par', pars.pop()))

        def accepts(v):
            for c in conds:
                if c[0] == 'pin' and v[c[1]] != c[2]:
                    return False
                if c[0] == 'rel' and v[c[1]] ^ v[c[2]] != c[3]:
                    return False
                if c[0] == 'par' and v[0] ^ v[1] ^ v[2] != c[1]:
                    return False
            return True
        sols = {(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)
                if accepts((a, b, c))}
        if sols != Vs:
            conds = [('pin', pos, bit(self.Q[qx(q)], j))
                     for pos, q in ((0, xi), (1, yi), (2, zi))]

        qs = (xi, yi, zi)
        for c in conds:
            if c[0] == 'pin':
                self.add_pin(qs[c[1]], j, c[2])
            elif c[0] == 'rel':
                q1, q2 = qs[c[1]], qs[c[2]]
                hi, lo = (q1, q2) if q1 > q2 else (q2, q1)
                self.add_rel(hi, lo, j, c[3])
            else:
                # parity over three consecutive state words
                if zi < 1:
                    # split around ihv words: fix all three instead
                    for pos, q in ((0, xi), (1, yi), (2, zi)):
                        self.add_pin(q, j, bit(self.Q[qx(q)], j))
                else:
                    self.add_x3(xi, j, c[1])

    def propagate(self):
        # Fixed point: relations with a pinned endpoint become pins.
        changed = True
        while changed:
            changed = False
            for (i, j), (dep, c) in list(self.rel.items()):
                o = i - dep
                if (i, j) in self.pin and (o, j) not in self.pin and o >= 1:
                    self.pin[(o, j)] = self.pin[(i, j)] ^ c
                    del self.rel[(i, j)]
                    changed = True
                elif (o, j) in self.pin and (i, j) not in self.pin:
                    self.pin[(i, j)] = self.pin[(o, j)] ^ c
                    del self.rel[(i, j)]
                    changed = True
                elif (i, j) in self.pin and ((o, j) in self.pin or o < 1):
                    del self.rel[(i, j)]
                    changed = True
            for (i, j), c in list(self.x3.items()):
                known = [(k, j) in self.pin for k in (i, i - 1, i - 2)]
                if sum(known) >= 2:
                    ks = [i, i - 1, i - 2]
                    un = [k for k in ks if (k, j) not in self.pin]
                    if un:
                        v = c
                        for k in ks:
                            if (k, j) in self.pin:
                                v ^= self.pin[(k, j)]
                        self.pin[(un[0], j)] = v
                    del self.x3[(i, j)]
                    changed = True

    def run(self):
        self.difference_pins()
        self.f_conditions()
        self.propagate()
        self.verify()
        return self

    def bit_state(self, i, j):
        if (i, j) in self.pin:
            return 'pin'
        if (i, j) in self.rel or (i, j) in self.x3:
            return 'tied'
        for (ii, jj), (dep, c) in self.rel.items():
            if jj == j and ii - dep == i:
                return 'tied'
        for (ii, jj) in self.x3:
            if jj == j and i in (ii - 1, ii - 2):
                return 'tied'
        for (hi, lo, jj, c) in self.iv_link:
            if jj == j and hi == i:
                return 'tied'
        return 'free'

    def verify(self):
        for (i, j), v in self.pin.items():
            assert bit(self.Q[qx(i)], j) == v, ('pin', i, j)
        for (i, j), (dep, c) in self.rel.items():
            assert bit(self.Q[qx(i)], j) ^ bit(self.Q[qx(i - dep)], j) == c
        for (i, j), c in self.x3.items():
            assert (bit(self.Q[qx(i)], j) ^ bit(self.Q[qx(i - 1)], j) ^
                    bit(self.Q[qx(i - 2)], j)) == c


def tunnels_of(d):
    """Candidate flip masks; usability of each bit is state-dependent."""
    out = []
    for name, flip_q, enable, recompute, reentry in (
            ('t16', 16, [], [15], 16),
            ('t10', 10, [(11, 0), (12, 1)], [9, 10, 13], 21),
            ('t4', 4, [(5, 0), (6, 1)], [3, 4, 7], 23),
            ('t9', 9, [(10, 0), (11, 1)], [8, 9, 12], 24)):
        mask = 0
        pref = []
        for j in range(32):
            if any(bit(d.xq(q), j) for q in [flip_q] + [q for q, _ in enable]):
                continue
            if d.bit_state(flip_q, j) != 'free':
                continue
            ok = True
            for q, v in enable:
                st = d.bit_state(q, j)
                if st == 'tied' or (st == 'pin' and d.pin[(q, j)] != v):
                    ok = False
            if ok:
                mask |= 1 << j
                for q, v in enable:
                    if d.bit_state(q, j) == 'free':
                        pref.append((q, j, v))
        out.append((name, flip_q, mask, enable, recompute, reentry, pref))
    return out


def sampler_masks(d):
    rows = []
    for i in range(1, 17):
        pm = pv = m1 = c1 = m2 = c2 = m3 = c3 = 0
        for j in range(32):
            if (i, j) in d.pin:
                pm |= 1 << j
                pv |= d.pin[(i, j)] << j
            elif (i, j) in d.rel:
                dep, c = d.rel[(i, j)]
                if dep == 1:
                    m1 |= 1 << j
                    c1 |= c << j
                else:
                    m2 |= 1 << j
                    c2 |= c << j
            elif (i, j) in d.x3:
                m3 |= 1 << j
                c3 |= d.x3[(i, j)] << j
        free = M & ~(pm | m1 | m2 | m3)
        rows.append((pm, pv, m1, c1, m2, c2, m3, c3, free))
    return rows


def emit_block(name, d, pref_map):
    rows = sampler_masks(d)
    print(f"const BlockTables {name} = {{")
    print("    // sampler masks: pm, pv, m1, c1, m2, c2, m3, c3, free (Q1..Q16)")
    print("    {")
    for r in rows:
        print("        {" + ", ".join(f"0x{v:08x}u" for v in r) + "},")
    print("    },")
    xq = [d.xq(i) for i in range(-3, 65)]
    print("    // per-word xor targets, index i+3 for state word Q_i")
    print("    {" + ",\n     ".join(
        ", ".join(f"0x{v:08x}u" for v in xq[k:k + 6]) for k in range(0, 68, 6)) + "},")
    print("    {" + ", ".join(f"0x{v:08x}u" for v in d.dm) + "},")
    links = list(d.iv_link) + [(0, 0, 0, 0)] * (8 - len(d.iv_link))
    print("    // ihv-linked sampler pins (word index, source word, bit, xor)")
    print("    {" + ", ".join(f"{{{hi}, {lo}, {j}, {c}}}"
                              for (hi, lo, j, c) in links) + "},")
    print(f"    {len(d.iv_link)},")
    print("    // sampling bias toward tunnel-enabling values (mask, value)")
    print("    {")
    for i in range(1, 17):
        mask = val = 0
        for (q, j, v) in pref_map:
            if q == i:
                mask |= 1 << j
                val |= v << j
        print(f"        {{0x{mask:08x}u, 0x{val:08x}u}},")
    print("    },")
    print("    // tunnels: flip word, candidate mask, enables, rederived words, re-entry")
    print("    {")
    for (tname, flip_q, mask, enable, recompute, reentry, _) in tunnels_of(d):
        en = list(enable) + [(0, 0)] * (2 - len(enable))
        en_s = ", ".join(f"{{{q}, {v}}}" for q, v in en)
        rec = list(recompute) + [0] * (3 - len(recompute))
        rec_s = ", ".join(str(w) for w in rec)
        print(f"        {{{flip_q}, 0x{mask:08x}u, {{{en_s}}}, {len(enable)}, "
              f"{{{rec_s}}}, {len(recompute)}, {reentry}}},")
    print("    },")


def main():
    m1, m1p = words_of(PAIR_A[:64]), words_of(PAIR_B[:64])
    m2, m2p = words_of(PAIR_A[64:]), words_of(PAIR_B[64:])
    out1, _, _ = compress_trace(IV, m1)
    out1p, _, _ = compress_trace(IV, m1p)
    out2, _, _ = compress_trace(out1, m2)
    out2p, _, _ = compress_trace(out1p, m2p)
    assert out2 == out2p, "pair does not collide"

    d1 = Derivation(IV, IV, m1, m1p).run()
    d2 = Derivation(out1, out1p, m2, m2p).run()

    delta1 = tuple((out1p[w] - out1[w]) & M for w in range(4))

    print("// Generated by tools/gen_tables.py -- do not edit by hand.")
    print("#include \"colkit/collision_tables.hpp\"")
    print()
    print("namespace colkit::detail {")
    print()
    t1 = tunnels_of(d1)
    t2 = tunnels_of(d2)
    emit_block("kBlock1", d1, [p for t in t1 for p in t[6]])
    print("};")
    print()
    emit_block("kBlock2", d2, [p for t in t2 for p in t[6]])
    print("};")
    print()
    print("// Difference the first block must produce between the two chain values")
    print("const uint32_t kIhvDelta[4] = {" +
          ", ".join(f"0x{v:08x}u" for v in delta1) + "};")
    print()
    print("// Eligibility of a first-block output as a second-block starting state:")
    print("// value pins (word, bit, value) and equalities (word, word, bit, xor).")
    wname = {-3: 0, 0: 1, -1: 2, -2: 3}   # ihv slot for each state word index
    pins = [(wname[i], j, v) for (i, j, v) in d2.iv_pin]
    rels = [(wname[a], wname[b], j, c) for (a, b, j, c) in d2.iv_rel]
    print("const IhvPin kIhvPins[] = {" +
          ", ".join(f"{{{w}, {j}, {v}}}" for (w, j, v) in sorted(pins)) + "};")
    print(f"const int kNumIhvPins = {len(pins)};")
    print("const IhvRel kIhvRels[] = {" +
          ", ".join(f"{{{a}, {b}, {j}, {c}}}" for (a, b, j, c) in sorted(rels)) + "};")
    print(f"const int kNumIhvRels = {len(rels)};")
    print()
    print("}  // namespace colkit::detail")


if __name__ == "__main__":
    sys.exit(main())
