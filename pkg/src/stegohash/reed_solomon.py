"""Reed-Solomon codec over GF(2^8) with the QR polynomial 0x11d.

Encoding appends ``nsym`` parity bytes; decoding corrects up to nsym//2
byte errors (syndromes, Berlekamp-Massey, Chien search, Forney).
"""

from __future__ import annotations

from .exceptions import ExtractionError

_PRIM = 0x11D

GF_EXP = [0] * 512
GF_LOG = [0] * 256
_x = 1
for _i in range(255):
    GF_EXP[_i] = _x
    GF_LOG[_x] = _i
    _x <<= 1
    if _x & 0x100:
        _x ^= _PRIM
for _i in range(255, 512):
    GF_EXP[_i] = GF_EXP[_i - 255]


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return GF_EXP[GF_LOG[a] + GF_LOG[b]]


def gf_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("GF division by zero")
    if a == 0:
        return 0
    return GF_EXP[(GF_LOG[a] - GF_LOG[b]) % 255]


def _poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if pi == 0:
            continue
        for j, qj in enumerate(q):
            out[i + j] ^= gf_mul(pi, qj)
    return out


def _poly_eval(poly, x):
    # Horner; poly[0] is the highest-degree coefficient.
    y = poly[0]
    for c in poly[1:]:
        y = gf_mul(y, x) ^ c
    return y


def _generator_poly(nsym: int):
    g = [1]
    for i in range(nsym):
        g = _poly_mul(g, [1, GF_EXP[i]])
    return g


def rs_encode(data: bytes, nsym: int) -> bytes:
    """Return data plus nsym Reed-Solomon parity bytes."""
    gen = _generator_poly(nsym)
    rem = [0] * nsym
    for byte in data:
        factor = byte ^ rem[0]
        rem = rem[1:] + [0]
        if factor != 0:
            lf = GF_LOG[factor]
            for i in range(nsym):
                if gen[i + 1] != 0:
                    rem[i] ^= GF_EXP[lf + GF_LOG[gen[i + 1]]]
    return bytes(data) + bytes(rem)


def _syndromes(codeword, nsym):
    return [_poly_eval(list(codeword), GF_EXP[i]) for i in range(nsym)]


def _berlekamp_massey(synd):
    err_loc = [1]
    old_loc = [1]
    for i in range(len(synd)):
        delta = synd[i]
        for j in range(1, len(err_loc)):
            delta ^= gf_mul(err_loc[-(j + 1)], synd[i - j])
        old_loc.append(0)
        if delta != 0:
            if len(old_loc) > len(err_loc):
                new_loc = [gf_mul(c, delta) for c in old_loc]
                old_loc = [gf_div(c, delta) for c in err_loc]
                err_loc = new_loc
            scaled = [gf_mul(c, delta) for c in old_loc]
            width = max(len(scaled), len(err_loc))
            scaled = [0] * (width - len(scaled)) + scaled
            err_loc = [0] * (width - len(err_loc)) + err_loc
            err_loc = [a ^ b for a, b in zip(err_loc, scaled)]
    while err_loc and err_loc[0] == 0:
        err_loc.pop(0)
    return err_loc


def rs_decode(codeword: bytes, nsym: int) -> bytes:
    """Correct up to nsym//2 byte errors; return the data part.

    Raises ExtractionError when the word is uncorrectable.
    """
    msg = list(codeword)
    synd = _syndromes(msg, nsym)
    if max(synd) == 0:
        return bytes(msg[:-nsym])

    err_loc = _berlekamp_massey(synd)
    n_errors = len(err_loc) - 1
    if n_errors * 2 > nsym:
        raise ExtractionError("RS: too many errors to correct")

    # Chien search over all codeword positions.
    positions = []
    for i in range(len(msg)):
        if _poly_eval(err_loc, GF_EXP[(255 - (len(msg) - 1 - i)) % 255]) == 0:
            positions.append(i)
    if len(positions) != n_errors:
        raise ExtractionError("RS: error locator degree mismatch")

    # Forney: error evaluator omega = synd * err_loc mod x^nsym.
    synd_poly = list(reversed(synd))
    omega_full = _poly_mul(synd_poly, err_loc)
    omega = omega_full[len(omega_full) - nsym:]

    # Formal derivative of the locator (coefficients of odd powers).
    err_loc_rev = list(reversed(err_loc))
    deriv_rev = [err_loc_rev[i] for i in range(1, len(err_loc_rev), 2)]

    for pos in positions:
        x_log = (len(msg) - 1 - pos) % 255
        x_inv = GF_EXP[(255 - x_log) % 255]
        om = _poly_eval(omega, x_inv)
        x_inv_sq = gf_mul(x_inv, x_inv)
        dv = 0
        xp = 1
        for c in deriv_rev:
            dv ^= gf_mul(c, xp)
            xp = gf_mul(xp, x_inv_sq)
        if dv == 0:
            raise ExtractionError("RS: Forney denominator is zero")
        magnitude = gf_mul(GF_EXP[x_log], gf_div(om, dv))
        msg[pos] ^= magnitude

    if max(_syndromes(msg, nsym)) != 0:
        raise ExtractionError("RS: correction failed")
    return bytes(msg[:-nsym])
