#!/usr/bin/env python3
"""Smoke test for the mcqite_py extension module.

Builds nothing itself: expects `cargo build -p mcqite-python --release`
(or debug) to have produced libmcqite_py.so, which is copied next to a
temp directory as mcqite_py.so and imported.

Run from the repository root:

    cargo build -p mcqite-python --release
    python3 python/smoke_test.py
"""

import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        ROOT / "target" / "release" / "libmcqite_py.so",
        ROOT / "target" / "debug" / "libmcqite_py.so",
    ]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        sys.exit(
            "libmcqite_py.so not found; run `cargo build -p mcqite-python --release` first"
        )
    tmp = tempfile.mkdtemp(prefix="mcqite_py_")
    shutil.copy(lib, pathlib.Path(tmp) / "mcqite_py.so")
    sys.path.insert(0, tmp)
    import mcqite_py

    return mcqite_py


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    mq = load_module()
    print(f"mcqite_py {mq.__version__}")

    # Spectra.
    h = mq.Hamiltonian.single_qubit_z()
    assert h.eigenvalues() == [-1.0, 1.0]
    ising = mq.Hamiltonian.ising(3, periodic=True)
    summary = ising.spectral_summary()
    assert summary["dim"] == 8
    assert summary["gap"] > 0.0
    print(f"ising(3): E_gs = {summary['ground_energy']:.6f}, gap = {summary['gap']:.6f}")

    # Imaginary-time evolution drives |+> toward the σz ground state.
    plus = mq.InitialState.plus_all()
    amps = plus.build(h)
    evolved = mq.imaginary_evolved(h, amps, 5.0)
    assert abs(evolved[1]) ** 2 > 0.9999

    # Schedules: counts, certificates, wire-format round trip.
    hedge = mq.Schedule.hedge(4)
    assert hedge.gate_count == 30
    cert = hedge.validate()
    assert cert["optimal_gate_count"] and cert["first_copy_steps"] == 4
    again = mq.Schedule.parse(hedge.serialize())
    assert again.serialize() == hedge.serialize()
    v = mq.Schedule.tree(2).to_v()
    assert v.validate()["gate_count"] == 3
    print(f"hedge(4): {hedge!r}")

    # Engine consistency: recurrence vs full statevector tree.
    tree = mq.Schedule.tree(3)
    full = mq.run_statevector(tree, h, plus, 0.1)
    rec = mq.run_tree_recurrence(h, plus, 0.1, 3)
    approx(full.energy, rec.energy, 1e-9)
    approx(full.fidelity_beta, rec.fidelity_beta, 1e-9)
    print(f"tree(3): energy {full.energy:.8f}, F_beta {full.fidelity_beta:.8f}")

    # Post-selection reports a success probability in (0, 1].
    post = mq.run_postselected(mq.Schedule.hedge(2), h, plus, 0.3)
    assert 0.0 < post.success_probability <= 1.0

    # Virtual cooling: closed form vs circuit oracle, two-level probability.
    eps = 0.2
    vc = mq.virtual_cool(h, eps, 5)
    approx(vc["probabilities"][0], 0.5 + math.sin(4 * eps) / 4, 1e-12)
    oracle = mq.virtual_cool_oracle(h, eps)
    rho = vc["rho_tilde"]
    err = max(
        abs(oracle[r][c] - rho[r][c]) for r in range(2) for c in range(2)
    )
    assert err < 1e-10, f"oracle mismatch {err}"
    print(f"virtual cooling p_gs = {vc['probabilities'][0]:.6f} (oracle err {err:.2e})")

    # Error bound dominates the measured recurrence error.
    rep = mq.tree_error_bound(h, plus, 0.5, 20)
    assert rep["slack"] >= -1e-8
    print(f"bound {rep['bound']:.6f} >= measured {rep['measured']:.6f}")

    # Step-size optimization on a small hedge run.
    opt = mq.optimize_step(mq.Schedule.hedge(3), h, plus, grid_points=15)
    assert opt["energy"] <= -0.9
    print(f"hedge(3) optimum: eps* = {opt['eps_star']:.4f}, E = {opt['energy']:.6f}")

    print("smoke test passed")


if __name__ == "__main__":
    main()
