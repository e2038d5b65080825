#!/usr/bin/env python3
"""Generate the bundled H4/STO-3G FCIDUMP (restricted Hartree-Fock orbitals).

Linear H4 chain with uniform spacing (default 2.0 bohr).  All four basis
functions are contracted s-type Gaussians, so every integral has a closed
form in the Boys function F0; no quantum-chemistry package is required.

Usage: python3 make_h4_fcidump.py [spacing_bohr] [out_path]
"""

import math
import sys

import numpy as np

# STO-3G hydrogen s function: exponents and contraction coefficients
# (already scaled for H).
ALPHA = np.array([3.42525091, 0.62391373, 0.16885540])
COEF = np.array([0.15432897, 0.53532814, 0.44463454])


def f0(t):
    """Boys function F0(t) = (1/2) sqrt(pi/t) erf(sqrt(t))."""
    if t < 1e-12:
        return 1.0 - t / 3.0
    st = math.sqrt(t)
    return 0.5 * math.sqrt(math.pi) / st * math.erf(st)


def build_integrals(centers):
    n = len(centers)
    # Normalized primitive pairs: contraction weights including (2a/pi)^(3/4).
    norm = (2.0 * ALPHA / math.pi) ** 0.75
    w = COEF * norm

    def pairs(ra, rb):
        """Per-primitive-pair data: weight, total exponent, reduced, center."""
        out = []
        rab2 = float(np.dot(ra - rb, ra - rb))
        for a, wa in zip(ALPHA, w):
            for b, wb in zip(ALPHA, w):
                p = a + b
                pre = wa * wb * math.exp(-a * b / p * rab2)
                rp = (a * ra + b * rb) / p
                out.append((pre, p, a * b / p, rp, rab2))
        return out

    s = np.zeros((n, n))
    t = np.zeros((n, n))
    v = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            for pre, p, mu, rp, rab2 in pairs(centers[i], centers[j]):
                gauss = pre * (math.pi / p) ** 1.5
                s[i, j] += gauss
                t[i, j] += mu * (3.0 - 2.0 * mu * rab2) * gauss
                for rc in centers:  # unit nuclear charges
                    rpc2 = float(np.dot(rp - rc, rp - rc))
                    v[i, j] -= pre * 2.0 * math.pi / p * f0(p * rpc2)

    eri = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i + 1):
            pij = pairs(centers[i], centers[j])
            for k in range(n):
                for l in range(k + 1):
                    if (i * (i + 1) // 2 + j) < (k * (k + 1) // 2 + l):
                        continue
                    val = 0.0
                    for pre1, p, _, rp, _ in pij:
                        for pre2, q, _, rq, _ in pairs(centers[k], centers[l]):
                            rpq2 = float(np.dot(rp - rq, rp - rq))
                            val += (pre1 * pre2 * 2.0 * math.pi**2.5
                                    / (p * q * math.sqrt(p + q)) * f0(p * q / (p + q) * rpq2))
                    for a, b in ((i, j), (j, i)):
                        for c, d in ((k, l), (l, k)):
                            eri[a, b, c, d] = eri[c, d, a, b] = val
    return s, t + v, eri


def rhf(s, hcore, eri, n_occ):
    """Closed-shell SCF with symmetric orthogonalization; returns (C, E_elec)."""
    se, sv = np.linalg.eigh(s)
    x = sv @ np.diag(se**-0.5) @ sv.T
    f = hcore.copy()
    e_old = 0.0
    for _ in range(200):
        fe, fv = np.linalg.eigh(x.T @ f @ x)
        c = x @ fv
        cocc = c[:, :n_occ]
        d = 2.0 * cocc @ cocc.T
        j = np.einsum("pqrs,rs->pq", eri, d)
        k = np.einsum("prqs,rs->pq", eri, d)
        f = hcore + j - 0.5 * k
        e = 0.5 * np.sum(d * (hcore + f))
        if abs(e - e_old) < 1e-12:
            break
        e_old = e
    return c, e


def main():
    spacing = float(sys.argv[1]) if len(sys.argv) > 1 else 2.0
    out_path = sys.argv[2] if len(sys.argv) > 2 else "h4_sto3g.fcidump"
    centers = [np.array([0.0, 0.0, k * spacing]) for k in range(4)]

    s, hcore, eri = build_integrals(centers)
    c, e_elec = rhf(s, hcore, eri, n_occ=2)

    e_nuc = sum(1.0 / np.linalg.norm(centers[i] - centers[j])
                for i in range(4) for j in range(i))
    print(f"RHF total energy: {e_elec + e_nuc:.10f} (electronic {e_elec:.10f})")

    h_mo = c.T @ hcore @ c
    eri_mo = np.einsum("pi,qj,rk,sl,pqrs->ijkl", c, c, c, c, eri, optimize=True)

    n = 4
    with open(out_path, "w") as out:
        out.write(f"&FCI NORB={n},NELEC=4,MS2=0,\n")
        out.write(" ORBSYM=" + "1," * n + "\n ISYM=1,\n /\n")
        for i in range(n):
            for j in range(i + 1):
                for k in range(i + 1):
                    lmax = j + 1 if k == i else k + 1
                    for l in range(lmax):
                        val = eri_mo[i, j, k, l]
                        if abs(val) > 1e-14:
                            out.write(f" {val:23.16e} {i+1:3d} {j+1:3d} {k+1:3d} {l+1:3d}\n")
        for i in range(n):
            for j in range(i + 1):
                if abs(h_mo[i, j]) > 1e-14:
                    out.write(f" {h_mo[i, j]:23.16e} {i+1:3d} {j+1:3d}   0   0\n")
        out.write(f" {e_nuc:23.16e}   0   0   0   0\n")
    print(f"wrote {out_path}")


if __name__ == "__main__":
    main()
