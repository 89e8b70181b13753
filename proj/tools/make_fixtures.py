#!/usr/bin/env python3
# Copyright 2026 The qgse Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the bundled fixtures.

Requires pyscf and numpy. The committed files are the source of truth for
the tests; this script documents how they were produced.
"""

import json
import os

import numpy as np
from pyscf import ao2mo, fci, gto, scf
from pyscf.tools import fcidump

HERE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")


def interleaved_mask(astr, bstr, norb):
    """Spin-orbital bit mask (qubit 2p alpha, 2p+1 beta) and the sign that
    takes pyscf's alpha-block-then-beta-block ordering to ascending qubit order."""
    occ = [2 * p for p in range(norb) if (astr >> p) & 1]
    occ += [2 * p + 1 for p in range(norb) if (bstr >> p) & 1]
    inversions = sum(1 for i in range(len(occ)) for j in range(i + 1, len(occ)) if occ[i] > occ[j])
    mask = 0
    for q in occ:
        mask |= 1 << q
    return mask, (-1) ** inversions


def h2(bond, name):
    mol = gto.M(atom=f"H 0 0 0; H 0 0 {bond}", basis="sto-3g", unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    fcidump.from_scf(mf, os.path.join(HERE, name + ".fcidump"), tol=1e-15)
    norb = mf.mo_coeff.shape[1]
    h1 = mf.mo_coeff.T @ mf.get_hcore() @ mf.mo_coeff
    eri = ao2mo.kernel(mol, mf.mo_coeff)
    e_fci, civec = fci.direct_spin1.kernel(h1, eri, norb, mol.nelectron, ecore=mol.energy_nuc(),
                                           conv_tol=1e-14)
    strs = fci.cistring.make_strings(range(norb), mol.nelectron // 2)
    dets = []
    for ia, a in enumerate(strs):
        for ib, b in enumerate(strs):
            c = civec[ia, ib]
            if abs(c) < 1e-14:
                continue
            mask, sign = interleaved_mask(int(a), int(b), norb)
            dets.append({"mask": "0b" + format(mask, "b"), "coeff": float(sign * c)})
    dets.sort(key=lambda d: -abs(d["coeff"]))
    with open(os.path.join(HERE, name + "_ci.json"), "w") as f:
        json.dump({"norb": norb, "dets": dets}, f, indent=1)
    return {"bond_angstrom": bond, "e_hf": mf.e_tot, "e_fci": e_fci}


def spin_polarized_toy(seed=7):
    """4 spatial orbitals, 2 electrons, both alpha (MS2=2)."""
    rng = np.random.default_rng(seed)
    norb = 4
    h1 = rng.normal(scale=0.3, size=(norb, norb))
    h1 = 0.5 * (h1 + h1.T) + np.diag([-1.2, -0.9, -0.4, -0.1])
    a = rng.normal(scale=0.1, size=(norb * norb, norb * norb))
    g = a @ a.T  # positive semidefinite supermatrix
    g = g.reshape(norb, norb, norb, norb)
    g = 0.5 * (g + g.transpose(1, 0, 2, 3))
    g = 0.5 * (g + g.transpose(0, 1, 3, 2))
    g = 0.5 * (g + g.transpose(2, 3, 0, 1))
    fcidump.from_integrals(os.path.join(HERE, "spinpol4.fcidump"), h1, ao2mo.restore(8, g, norb),
                           norb, 2, nuc=0.5, ms=2, tol=1e-15)


def toy3():
    terms = [
        ([1.0, 0.0], "Z0"), ([-0.4, 0.0], "Z1"), ([0.3, 0.0], "Z2"),
        ([0.5, 0.0], "X0 X1"), ([0.25, 0.0], "Y1 Y2"), ([0.2, 0.0], "Z0 Z2"),
        ([-0.15, 0.0], "X0 Z1 X2"), ([0.1, 0.0], ""),
    ]
    with open(os.path.join(HERE, "toy3.json"), "w") as f:
        json.dump({"n_qubits": 3, "terms": [{"coeff": c, "paulis": p} for c, p in terms]}, f, indent=1)


if __name__ == "__main__":
    info = {"h2_eq": h2(0.7414, "h2_eq"), "h2_stretched": h2(2.0, "h2_stretched")}
    spin_polarized_toy()
    toy3()
    with open(os.path.join(HERE, "reference.json"), "w") as f:
        json.dump(info, f, indent=1)
    print(json.dumps(info, indent=1))
