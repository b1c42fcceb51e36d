#!/usr/bin/env python3
"""Regenerate the integral fixtures used by the test suites.

Writes, per system, a canonical-RHF-orbital FCIDUMP, an AO-JSON bundle and a
reference JSON with PySCF FCI sector ground energies. Requires pyscf.

    python3 tests/data/generate_fixtures.py [outdir]
"""
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np
from pyscf import ao2mo, fci, gto, scf
from pyscf.tools import fcidump

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent


def chain(n, spacing=0.74):
    return [("H", (0.0, 0.0, i * spacing)) for i in range(n)]


def water(r, angle_deg):
    half = math.radians(angle_deg) / 2.0
    return [("O", (0.0, 0.0, 0.0)),
            ("H", (r * math.sin(half), r * math.cos(half), 0.0)),
            ("H", (-r * math.sin(half), r * math.cos(half), 0.0))]


def beh2(r):
    return [("Be", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, r)), ("H", (0.0, 0.0, -r))]


def ammonia(r, hnh_deg):
    # C3v pyramid with N at the origin and the three H in a plane below it.
    hnh = math.radians(hnh_deg)
    # radius of the H circle from the H-H distance of an equilateral triangle
    d_hh = 2.0 * r * math.sin(hnh / 2.0)
    rho = d_hh / math.sqrt(3.0)
    z = -math.sqrt(max(r * r - rho * rho, 0.0))
    atoms = [("N", (0.0, 0.0, 0.0))]
    for k in range(3):
        phi = 2.0 * math.pi * k / 3.0
        atoms.append(("H", (rho * math.cos(phi), rho * math.sin(phi), z)))
    return atoms


# name -> (atoms, basis, reference sectors for pyscf FCI ground energies)
SYSTEMS = {
    "h2_sto6g": (chain(2), "sto-6g", [(1, 1), (1, 0), (2, 1)]),
    "h4_sto6g": (chain(4), "sto-6g", [(2, 2), (3, 1), (2, 1)]),
    "h6_sto6g": (chain(6), "sto-6g", [(3, 3), (4, 2)]),
    "h8_sto6g": (chain(8), "sto-6g", [(4, 4)]),
    "h10_sto6g": (chain(10), "sto-6g", []),
    "h14_sto6g": (chain(14), "sto-6g", []),
    "h18_sto6g": (chain(18), "sto-6g", []),
    # bond lengths in Angstrom; see README for the geometry convention
    "h2o_sto6g": (water(1.0, 107.6), "sto-6g", [(5, 5)]),
    "beh2_sto6g": (beh2(1.0), "sto-6g", [(3, 3)]),
    "nh3_sto6g": (ammonia(1.0, 107.0), "sto-6g", [(5, 5)]),
    # the published small-molecule FCI/HF tier values reproduce in STO-3G
    "h2o_sto3g": (water(1.0, 107.6), "sto-3g", [(5, 5)]),
    "beh2_sto3g": (beh2(1.0), "sto-3g", [(3, 3)]),
    "nh3_sto3g": (ammonia(1.0, 107.0), "sto-3g", [(5, 5)]),
}


def sha256(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def build(name, atoms, basis, sectors):
    mol = gto.M(atom=atoms, basis=basis, unit="Angstrom", verbose=0)
    n = mol.nao_nr()
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    e_rhf = mf.kernel()
    c = mf.mo_coeff
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.full(mol, c), n)
    nelec = mol.nelectron

    fcidump_path = OUT / f"{name}.fcidump"
    fcidump.from_integrals(str(fcidump_path), h1, ao2mo.restore(8, eri, n), n,
                           nelec, nuc=mol.energy_nuc(), ms=0,
                           float_format=" %.17g", tol=1e-16)

    s = mol.intor("int1e_ovlp")
    h_ao = mol.intor("int1e_kin") + mol.intor("int1e_nuc")
    g_ao = mol.intor("int2e")
    ao = {
        "n_ao": int(n),
        "e_const": float(mol.energy_nuc()),
        "S": s.reshape(-1).tolist(),
        "h": h_ao.reshape(-1).tolist(),
        "g": g_ao.reshape(-1).tolist(),
        "meta": {
            "system": name,
            "basis": basis,
            "geometry_angstrom": [[a, list(xyz)] for a, xyz in atoms],
            "n_elec": int(nelec),
            "backend": f"pyscf",
        },
    }
    ao_path = OUT / f"{name}.ao.json"
    ao_path.write_text(json.dumps(ao))

    refs = []
    for na, nb in sectors:
        e, _ = fci.direct_spin1.kernel(h1, eri, n, (na, nb), ecore=mol.energy_nuc(),
                                       conv_tol=1e-13, max_cycle=500, nroots=1)
        refs.append({"sector": [na, nb], "fci_ground": float(e)})
    ref = {
        "system": name,
        "basis": basis,
        "n_orb": int(n),
        "n_elec": int(nelec),
        "rhf_energy": float(e_rhf),
        "fci": refs,
        "geometry_angstrom": [[a, list(xyz)] for a, xyz in atoms],
        "sha256": {fcidump_path.name: sha256(fcidump_path), ao_path.name: sha256(ao_path)},
    }
    (OUT / f"{name}.ref.json").write_text(json.dumps(ref, indent=1))
    print(name, n, e_rhf, refs)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    only = set(sys.argv[2:])
    for key, (atoms, basis, sectors) in SYSTEMS.items():
        if only and key not in only:
            continue
        build(key, atoms, basis, sectors)
