#!/usr/bin/env python3
"""Regenerates the Touchstone fixtures in data/.

ue_dualband.s2p: two-port handset antenna. At 3.16 GHz port 1 (built for
2.46 GHz) is mismatched with |S11| = 0.786, |S21| = -22 dB, and S22 is solved
so the S-parameter ECC is exactly 0.04. At 2.46 GHz the roles swap.

bs_slot_array.s16p: 2 x 4 dual-polarized array, well matched, with weak
coupling between neighbouring co-polarized elements.
"""
import cmath
import math
import pathlib

import numpy as np
from scipy.optimize import brentq

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def ecc(s):
    s11, s12, s21, s22 = s[0, 0], s[0, 1], s[1, 0], s[1, 1]
    num = abs(np.conj(s11) * s12 + np.conj(s21) * s22) ** 2
    return num / ((1 - abs(s11) ** 2 - abs(s21) ** 2) * (1 - abs(s22) ** 2 - abs(s12) ** 2))


def ue_matrix(mismatched, iso_db, target_ecc, swap):
    b = 10 ** (iso_db / 20)

    def f(c):
        m = np.array([[mismatched, b], [b, c]], dtype=complex)
        return ecc(m) - target_ecc

    c = brentq(f, 0.0, 0.6)
    m = np.array([[mismatched, b], [b, c]], dtype=complex)
    if swap:
        m = m[::-1, ::-1].copy()
    assert np.linalg.norm(m, 2) < 1
    return m


def fmt(x):
    return repr(float(x))


def write_touchstone(path, header, freqs, mats):
    n = mats[0].shape[0]
    lines = ["! " + h for h in header]
    lines.append("# Hz S RI R 50")
    for f, m in zip(freqs, mats):
        if n == 2:
            order = [m[0, 0], m[1, 0], m[0, 1], m[1, 1]]
            lines.append(" ".join([fmt(f)] + [fmt(v.real) + " " + fmt(v.imag) for v in order]))
            continue
        for i in range(n):
            row = [m[i, j] for j in range(n)]
            for k in range(0, n, 4):
                chunk = " ".join(fmt(v.real) + " " + fmt(v.imag) for v in row[k:k + 4])
                lines.append((fmt(f) + " " if i == 0 and k == 0 else "") + chunk)
    path.write_text("\n".join(lines) + "\n")


def ue():
    freqs = [2.40e9, 2.46e9, 3.16e9, 3.30e9]
    hi = ue_matrix(0.786, -22.0, 0.04, swap=False)
    lo = ue_matrix(0.786, -22.0, 0.04, swap=True)
    mats = [lo, lo, hi, hi]
    write_touchstone(DATA / "ue_dualband.s2p",
                     ["dual-band handset antenna, port 1 top-left (2.46 GHz), port 2 bottom-right (3.16 GHz)",
                      "synthetic fixture: |S21| = -22 dB, ECC = 0.04 at both bands"],
                     freqs, mats)


def bs():
    rows, cols = 2, 4
    n = rows * cols * 2
    freqs = [2.40e9, 2.46e9, 3.16e9, 3.30e9]
    mats = []
    for f in freqs:
        m = np.zeros((n, n), dtype=complex)
        phase = 2 * math.pi * f / 3e9
        for e in range(rows * cols):
            r, c = divmod(e, cols)
            for p in range(2):
                i = 2 * e + p
                m[i, i] = 0.05 * cmath.exp(1j * (phase + 0.3 * p))
                for e2 in range(rows * cols):
                    r2, c2 = divmod(e2, cols)
                    if abs(r - r2) + abs(c - c2) == 1:
                        m[i, 2 * e2 + p] = 10 ** (-30 / 20) * cmath.exp(1j * (0.5 * phase + 1.0))
        assert np.allclose(m, m.T)
        assert np.linalg.norm(m, 2) < 1
        mats.append(m)
    write_touchstone(DATA / "bs_slot_array.s16p",
                     ["2 x 4 dual-polarized slot array, element-major port order, vertical first",
                      "synthetic fixture: |Sii| = -26 dB, neighbour coupling -30 dB"],
                     freqs, mats)


if __name__ == "__main__":
    ue()
    bs()
