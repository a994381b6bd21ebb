#!/usr/bin/env python3
"""Generate the bundled FCIDUMP fixtures (STO-3G, RHF canonical orbitals).

Self-contained restricted Hartree-Fock over contracted Gaussians (s and p
shells only), McMurchie-Davidson integrals, MO transformation, FCIDUMP
output in chemist notation with 8-fold permutational symmetry.

Usage: python3 scripts/make_fixtures.py [outdir]
"""

import math
import sys
import os

import numpy as np
from scipy.special import gammainc, gamma as gamma_fn
from scipy.linalg import eigh

ANGSTROM_TO_BOHR = 1.0 / 0.52917721092

# STO-3G exponents and contraction coefficients (Hehre, Stewart, Pople).
# The 2s/2p shells share exponents (sp shells).
S_COEF = [0.1543289673, 0.5353281423, 0.4446345422]
SP_S_COEF = [-0.09996722919, 0.3995128261, 0.7001154689]
SP_P_COEF = [0.1559162750, 0.6076837186, 0.3919573931]

STO3G = {
    "H": [("s", [3.425250914, 0.6239137298, 0.1688554040], S_COEF)],
    "Li": [
        ("s", [16.11957475, 2.936200663, 0.7946504870], S_COEF),
        ("s", [0.6362897469, 0.1478600533, 0.0480886784], SP_S_COEF),
        ("p", [0.6362897469, 0.1478600533, 0.0480886784], SP_P_COEF),
    ],
    "Be": [
        ("s", [30.16787069, 5.495115306, 1.487192653], S_COEF),
        ("s", [1.314833110, 0.3055389383, 0.0993707456], SP_S_COEF),
        ("p", [1.314833110, 0.3055389383, 0.0993707456], SP_P_COEF),
    ],
    "N": [
        ("s", [99.10616896, 18.05231239, 4.885660238], S_COEF),
        ("s", [3.780455879, 0.8784966449, 0.2857143744], SP_S_COEF),
        ("p", [3.780455879, 0.8784966449, 0.2857143744], SP_P_COEF),
    ],
    "O": [
        ("s", [130.7093214, 23.80886605, 6.443608313], S_COEF),
        ("s", [5.033151319, 1.169596125, 0.3803889600], SP_S_COEF),
        ("p", [5.033151319, 1.169596125, 0.3803889600], SP_P_COEF),
    ],
}

CHARGES = {"H": 1, "Li": 3, "Be": 4, "N": 7, "O": 8}

# Geometries in angstrom (x, y, z).
MOLECULES = {
    "h2": [("H", 0, 0, 0), ("H", 0, 0, 0.735)],
    "h4": [("H", 0, 0, 0), ("H", 0, 0, 0.735), ("H", 0, 0, 1.535), ("H", 0, 0, 2.135)],
    "h6": [
        ("H", 0, 0, 0), ("H", 0, 0, 0.735), ("H", 0, 0, 1.535),
        ("H", 0, 0, 2.135), ("H", 0, 0, 2.835), ("H", 0, 0, 3.57),
    ],
    "lih": [("Li", 0, 0, 0), ("H", 0, 0, 1.5949)],
    "beh2": [("Be", 0, 0, 0), ("H", 0, 0, 1.3264), ("H", 0, 0, -1.3264)],
    "h2o": [("O", 0, 0, 0.1173), ("H", 0, 0.7572, -0.4692), ("H", 0, -0.7572, -0.4692)],
    "nh3": [
        ("N", 0.0, 0.0, 0.0), ("H", 0.0, -0.9377, -0.3816),
        ("H", 0.8121, 0.4689, -0.3816), ("H", -0.8121, 0.4689, -0.3816),
    ],
}


def boys(n, x):
    if x < 1e-12:
        return 1.0 / (2 * n + 1)
    return gammainc(n + 0.5, x) * gamma_fn(n + 0.5) / (2 * x ** (n + 0.5))


def hermite_e(i, j, t, qx, a, b):
    """Hermite expansion coefficient E_t^{ij} (McMurchie-Davidson)."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-q * qx * qx)
    if j == 0:
        return (
            hermite_e(i - 1, j, t - 1, qx, a, b) / (2 * p)
            - q * qx / a * hermite_e(i - 1, j, t, qx, a, b)
            + (t + 1) * hermite_e(i - 1, j, t + 1, qx, a, b)
        )
    return (
        hermite_e(i, j - 1, t - 1, qx, a, b) / (2 * p)
        + q * qx / b * hermite_e(i, j - 1, t, qx, a, b)
        + (t + 1) * hermite_e(i, j - 1, t + 1, qx, a, b)
    )


def hermite_r(t, u, v, n, p, pc):
    """Hermite Coulomb integral R^n_{tuv}."""
    x, y, z = pc
    if t == u == v == 0:
        return (-2 * p) ** n * boys(n, p * (x * x + y * y + z * z))
    if t > 0:
        val = 0.0
        if t > 1:
            val += (t - 1) * hermite_r(t - 2, u, v, n + 1, p, pc)
        return val + x * hermite_r(t - 1, u, v, n + 1, p, pc)
    if u > 0:
        val = 0.0
        if u > 1:
            val += (u - 1) * hermite_r(t, u - 2, v, n + 1, p, pc)
        return val + y * hermite_r(t, u - 1, v, n + 1, p, pc)
    val = 0.0
    if v > 1:
        val += (v - 1) * hermite_r(t, u, v - 2, n + 1, p, pc)
    return val + z * hermite_r(t, u, v - 1, n + 1, p, pc)


class Primitive:
    def __init__(self, alpha, lmn, center):
        self.alpha = alpha
        self.lmn = lmn
        self.center = np.asarray(center, float)
        l, m, n = lmn
        # primitive normalization
        self.norm = math.sqrt(
            (2 * alpha / math.pi) ** 1.5
            * (4 * alpha) ** (l + m + n)
            / (df(2 * l - 1) * df(2 * m - 1) * df(2 * n - 1))
        )


def df(n):
    return 1 if n <= 0 else n * df(n - 2)


class Contracted:
    def __init__(self, prims, coefs):
        self.prims = prims
        self.coefs = list(coefs)
        s = overlap_c(self, self)
        self.scale = 1.0 / math.sqrt(s)

    def pairs(self):
        for p, c in zip(self.prims, self.coefs):
            yield p, c * self.scale * p.norm


def overlap_p(pa, pb):
    a, b = pa.alpha, pb.alpha
    p = a + b
    ab = pa.center - pb.center
    val = 1.0
    for k in range(3):
        val *= hermite_e(pa.lmn[k], pb.lmn[k], 0, ab[k], a, b)
    return val * (math.pi / p) ** 1.5


def overlap_c(ca, cb):
    tot = 0.0
    for pa, wa in _raw_pairs(ca):
        for pb, wb in _raw_pairs(cb):
            tot += wa * wb * overlap_p(pa, pb)
    return tot


def _raw_pairs(c):
    # pairs without the contracted-normalization scale (used to compute it)
    if hasattr(c, "scale"):
        for p, cc in zip(c.prims, c.coefs):
            yield p, cc * p.norm
    else:
        for p, cc in zip(c.prims, c.coefs):
            yield p, cc * p.norm


def kinetic_p(pa, pb):
    a, b = pa.alpha, pb.alpha
    l2, m2, n2 = pb.lmn

    def ov(lmn_shift):
        shifted = Primitive(b, tuple(x + y for x, y in zip(pb.lmn, lmn_shift)), pb.center)
        shifted.norm = 1.0
        return overlap_p(pa, shifted)

    term0 = b * (2 * (l2 + m2 + n2) + 3) * overlap_p(pa, pb)
    term1 = -2 * b * b * (ov((2, 0, 0)) + ov((0, 2, 0)) + ov((0, 0, 2)))
    term2 = 0.0
    if l2 >= 2:
        term2 += l2 * (l2 - 1) * ov((-2, 0, 0))
    if m2 >= 2:
        term2 += m2 * (m2 - 1) * ov((0, -2, 0))
    if n2 >= 2:
        term2 += n2 * (n2 - 1) * ov((0, 0, -2))
    return term0 + term1 - 0.5 * term2


def nuclear_p(pa, pb, atoms):
    a, b = pa.alpha, pb.alpha
    p = a + b
    pcenter = (a * pa.center + b * pb.center) / p
    ab = pa.center - pb.center
    val = 0.0
    l1, m1, n1 = pa.lmn
    l2, m2, n2 = pb.lmn
    for (z, c) in atoms:
        pc = pcenter - c
        acc = 0.0
        for t in range(l1 + l2 + 1):
            et = hermite_e(l1, l2, t, ab[0], a, b)
            if et == 0.0:
                continue
            for u in range(m1 + m2 + 1):
                eu = hermite_e(m1, m2, u, ab[1], a, b)
                if eu == 0.0:
                    continue
                for v in range(n1 + n2 + 1):
                    ev = hermite_e(n1, n2, v, ab[2], a, b)
                    if ev == 0.0:
                        continue
                    acc += et * eu * ev * hermite_r(t, u, v, 0, p, pc)
        val += -z * 2 * math.pi / p * acc
    return val


def eri_p(pa, pb, pc, pd):
    a, b, c, d = pa.alpha, pb.alpha, pc.alpha, pd.alpha
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    pcenter = (a * pa.center + b * pb.center) / p
    qcenter = (c * pc.center + d * pd.center) / q
    pq = pcenter - qcenter
    ab = pa.center - pb.center
    cd = pc.center - pd.center
    l1, m1, n1 = pa.lmn
    l2, m2, n2 = pb.lmn
    l3, m3, n3 = pc.lmn
    l4, m4, n4 = pd.lmn
    val = 0.0
    for t in range(l1 + l2 + 1):
        e1t = hermite_e(l1, l2, t, ab[0], a, b)
        if e1t == 0.0:
            continue
        for u in range(m1 + m2 + 1):
            e1u = hermite_e(m1, m2, u, ab[1], a, b)
            if e1u == 0.0:
                continue
            for v in range(n1 + n2 + 1):
                e1v = hermite_e(n1, n2, v, ab[2], a, b)
                if e1v == 0.0:
                    continue
                for tau in range(l3 + l4 + 1):
                    e2t = hermite_e(l3, l4, tau, cd[0], c, d)
                    if e2t == 0.0:
                        continue
                    for nu in range(m3 + m4 + 1):
                        e2u = hermite_e(m3, m4, nu, cd[1], c, d)
                        if e2u == 0.0:
                            continue
                        for phi in range(n3 + n4 + 1):
                            e2v = hermite_e(n3, n4, phi, cd[2], c, d)
                            if e2v == 0.0:
                                continue
                            r = hermite_r(t + tau, u + nu, v + phi, 0, alpha, pq)
                            sign = (-1) ** (tau + nu + phi)
                            val += e1t * e1u * e1v * e2t * e2u * e2v * sign * r
    val *= 2 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))
    return val


def build_basis(geom):
    basis = []
    atoms = []
    for (sym, x, y, z) in geom:
        center = np.array([x, y, z]) * ANGSTROM_TO_BOHR
        atoms.append((CHARGES[sym], center))
        for (shell, exps, coefs) in STO3G[sym]:
            if shell == "s":
                prims = [Primitive(e, (0, 0, 0), center) for e in exps]
                basis.append(Contracted(prims, coefs))
            else:
                for lmn in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]:
                    prims = [Primitive(e, lmn, center) for e in exps]
                    basis.append(Contracted(prims, coefs))
    return basis, atoms


def compute_integrals(basis, atoms):
    n = len(basis)
    s = np.zeros((n, n))
    t = np.zeros((n, n))
    v = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            sv = tv = vv = 0.0
            for pa, wa in basis[i].pairs():
                for pb, wb in basis[j].pairs():
                    w = wa * wb
                    sv += w * overlap_p(pa, pb)
                    tv += w * kinetic_p(pa, pb)
                    vv += w * nuclear_p(pa, pb, atoms)
            s[i, j] = s[j, i] = sv
            t[i, j] = t[j, i] = tv
            v[i, j] = v[j, i] = vv
    eri = np.zeros((n, n, n, n))
    # unique (ij|kl) under 8-fold symmetry
    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j if k == i else k
                for l in range(lmax + 1):
                    val = 0.0
                    for pa, wa in basis[i].pairs():
                        for pb, wb in basis[j].pairs():
                            for pc, wc in basis[k].pairs():
                                for pd, wd in basis[l].pairs():
                                    val += wa * wb * wc * wd * eri_p(pa, pb, pc, pd)
                    for (a, b, c, d) in (
                        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
                    ):
                        eri[a, b, c, d] = val
    return s, t, v, eri


def nuclear_repulsion(atoms):
    e = 0.0
    for i in range(len(atoms)):
        for j in range(i):
            zi, ci = atoms[i]
            zj, cj = atoms[j]
            e += zi * zj / np.linalg.norm(ci - cj)
    return e


def rhf(s, hcore, eri, nelec, max_iter=200, tol=1e-11):
    n = s.shape[0]
    nocc = nelec // 2
    sval, svec = eigh(s)
    x = svec @ np.diag(sval ** -0.5) @ svec.T
    f = hcore.copy()
    energy = 0.0
    dm = np.zeros_like(s)
    diis_f, diis_e = [], []
    for it in range(max_iter):
        fp = x.T @ f @ x
        eps, cp = eigh(fp)
        c = x @ cp
        cocc = c[:, :nocc]
        dm = 2.0 * cocc @ cocc.T
        j = np.einsum("ijkl,kl->ij", eri, dm)
        k = np.einsum("ikjl,kl->ij", eri, dm)
        f = hcore + j - 0.5 * k
        # DIIS
        err = f @ dm @ s - s @ dm @ f
        diis_f.append(f.copy())
        diis_e.append(err.copy())
        if len(diis_f) > 8:
            diis_f.pop(0)
            diis_e.pop(0)
        if len(diis_f) > 1:
            m = len(diis_f)
            bmat = -np.ones((m + 1, m + 1))
            bmat[m, m] = 0.0
            for a in range(m):
                for b in range(m):
                    bmat[a, b] = np.sum(diis_e[a] * diis_e[b])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(bmat, rhs)[:m]
                f = sum(wi * fi for wi, fi in zip(w, diis_f))
            except np.linalg.LinAlgError:
                pass
        enew = 0.5 * np.sum(dm * (hcore + f)) if it > 0 else 0.0
        if it > 1 and abs(enew - energy) < tol:
            energy = enew
            break
        energy = enew
    fp = x.T @ f @ x
    eps, cp = eigh(fp)
    c = x @ cp
    return energy, c, eps


def write_fcidump(path, hmo, erimo, ecore, nelec, thresh=1e-12):
    n = hmo.shape[0]
    with open(path, "w") as fh:
        fh.write(f"&FCI NORB={n:4d},NELEC={nelec:3d},MS2= 0,\n")
        fh.write("  ORBSYM=" + "1," * n + "\n")
        fh.write("  ISYM=1,\n")
        fh.write(" &END\n")
        for i in range(n):
            for j in range(i + 1):
                for k in range(i + 1):
                    lmax = j if k == i else k
                    for l in range(lmax + 1):
                        val = erimo[i, j, k, l]
                        if abs(val) > thresh:
                            fh.write(f" {val: .16E}  {i+1:3d} {j+1:3d} {k+1:3d} {l+1:3d}\n")
        for i in range(n):
            for j in range(i + 1):
                if abs(hmo[i, j]) > thresh:
                    fh.write(f" {hmo[i, j]: .16E}  {i+1:3d} {j+1:3d}   0   0\n")
        fh.write(f" {ecore: .16E}    0   0   0   0\n")


def geom_string(geom):
    return "; ".join(f"{s} {x} {y} {z}" for (s, x, y, z) in geom)


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else "fixtures"
    os.makedirs(outdir, exist_ok=True)
    for name, geom in MOLECULES.items():
        basis, atoms = build_basis(geom)
        s, t, v, eri = compute_integrals(basis, atoms)
        hcore = t + v
        nelec = sum(z for z, _ in atoms)
        enuc = nuclear_repulsion(atoms)
        escf, c, eps = rhf(s, hcore, eri, nelec)
        hmo = c.T @ hcore @ c
        erimo = np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri, c, c, c, c, optimize=True)
        path = os.path.join(outdir, f"{name}.fcidump")
        write_fcidump(path, hmo, erimo, enuc, nelec)
        with open(os.path.join(outdir, f"{name}.meta"), "w") as fh:
            fh.write(f"molecule: {name.upper()}\n")
            fh.write(f"geometry_angstrom: {geom_string(geom)}\n")
            fh.write("basis: STO-3G\n")
            fh.write("orbitals: canonical RHF, spatial, energy order\n")
            fh.write(f"rhf_energy_hartree: {escf + enuc:.10f}\n")
            fh.write(f"nuclear_repulsion_hartree: {enuc:.10f}\n")
        print(f"{name}: norb={len(basis)} nelec={nelec} "
              f"E(RHF)={escf + enuc:.8f} Enuc={enuc:.8f}")


if __name__ == "__main__":
    main()
