"""Regenerate the FCIDUMP fixtures with PySCF.

Each file carries the RHF and FCI reference energies as `# REF_HF=` /
`# REF_FCI=` comment lines ahead of the namelist.

    python3 fixtures/generate.py
"""
import os

import numpy as np
from pyscf import gto, scf, fci, ao2mo, mcscf
from pyscf.tools import fcidump

HERE = os.path.dirname(os.path.abspath(__file__))


def chain(n, d):
    return [("H", (0.0, 0.0, i * d)) for i in range(n)]


def beh2(d):
    return [("Be", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, d)), ("H", (0.0, 0.0, -d))]


def write(name, h1, eri, norb, nelec, ecore, e_hf, e_fci, comment):
    path = os.path.join(HERE, name)
    tmp = path + ".tmp"
    fcidump.from_integrals(tmp, h1, eri, norb, nelec, nuc=ecore, ms=0, tol=1e-14,
                           float_format=" %.16e")
    with open(tmp) as src, open(path, "w") as dst:
        dst.write(f"# {comment}\n")
        dst.write(f"# REF_HF={e_hf:.12f}\n")
        dst.write(f"# REF_FCI={e_fci:.12f}\n")
        dst.write(src.read())
    os.remove(tmp)
    print(f"{name}: norb={norb} nelec={nelec} HF={e_hf:.10f} FCI={e_fci:.10f}")


def full_space(name, atoms, comment):
    mol = gto.M(atom=atoms, basis="sto-3g", unit="Angstrom", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    assert mf.converged, name
    c = mf.mo_coeff
    norb = c.shape[1]
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), norb)
    solver = fci.direct_spin1.FCI()
    solver.conv_tol = 1e-12
    e_fci, _ = solver.kernel(h1, eri, norb, mol.nelectron, ecore=mol.energy_nuc())
    write(name, h1, eri, norb, mol.nelectron, mol.energy_nuc(), mf.e_tot, e_fci, comment)


def n2_cas66(name, d, comment):
    mol = gto.M(atom=[("N", (0, 0, 0)), ("N", (0, 0, d))], basis="sto-3g", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    cas = mcscf.CASCI(mf, 6, 6)
    h1, ecore = cas.get_h1eff()
    eri = ao2mo.restore(1, cas.get_h2eff(), 6)
    # HF determinant energy inside the active space equals the RHF energy
    solver = fci.direct_spin1.FCI()
    solver.conv_tol = 1e-12
    e_fci, _ = solver.kernel(h1, eri, 6, 6, ecore=ecore)
    write(name, h1, eri, 6, 6, ecore, mf.e_tot, e_fci, comment)


if __name__ == "__main__":
    full_space("h2.fcidump", chain(2, 0.7414), "H2 STO-3G, R=0.7414 A")
    full_space("h4_chain.fcidump", chain(4, 1.5), "linear H4 STO-3G, spacing 1.5 A")
    full_space("h6_3.0.fcidump", chain(6, 3.0), "linear H6 STO-3G, spacing 3.0 A")
    full_space("beh2_1.3264.fcidump", beh2(1.3264), "linear BeH2 STO-3G, Be-H 1.3264 A")
    full_space("beh2_3.0.fcidump", beh2(3.0), "linear BeH2 STO-3G, Be-H 3.0 A")
    n2_cas66("n2_cas66.fcidump", 1.0977, "N2 STO-3G CAS(6,6), R=1.0977 A, frozen core folded")
