#!/usr/bin/env python3
"""Build (if needed) and smoke-test the wexpand Python module.

Run from anywhere: `python3 python/smoke_test.py`
"""

import math
import pathlib
import shutil
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parents[1]
TOL = 1e-12


def ensure_module():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "wexpand-py"],
        check=True,
        cwd=ROOT,
    )
    built = ROOT / "target" / "release" / "libwexpand.so"
    target = pathlib.Path(__file__).resolve().parent / "wexpand.so"
    shutil.copy2(built, target)
    sys.path.insert(0, str(target.parent))


def main():
    ensure_module()
    import wexpand

    # Ideal W3: three single-V terms of amplitude 1/sqrt(3).
    w3 = wexpand.ideal_w(3)
    assert w3.modes == ["1", "2", "3"]
    amps = w3.amplitudes
    live = [a for a in amps if abs(a) > TOL]
    assert len(live) == 3
    assert all(abs(a - 1 / math.sqrt(3)) < TOL for a in live)

    # Expansion block on |H>|V> gives the symmetric Bell state.
    bell = wexpand.PureState.basis([("anc", "H"), ("in", "V")])
    wexpand.expansion_block(bell, "anc", "in")
    r = 1 / math.sqrt(2)
    assert abs(bell.amplitudes[1] - r) < TOL  # |V anc, H in>
    assert abs(bell.amplitudes[2] - r) < TOL  # |H anc, V in>

    # Cascade step: p(W2 -> W3) = 3/4 with ideal output.
    step = wexpand.cascade_step(wexpand.ideal_w(2))
    assert abs(step.success_probability - 0.75) < TOL
    assert step.fidelity > 1 - TOL
    assert step.target_modes == ["1", "2", "1a"]

    # Parallel doubling is deterministic and passes verification.
    doubled = wexpand.parallel_double(wexpand.ideal_w(3))
    assert abs(doubled.success_probability - 1.0) < TOL
    assert wexpand.verify_back(doubled.state)
    assert not wexpand.verify_back(
        wexpand.PureState.basis([(str(i), "H") for i in range(1, 7)])
    )

    # Closed forms match the simulator.
    assert abs(wexpand.p_step(2) - 0.75) < TOL
    assert abs(wexpand.p_partial(3, 2) - 5 / 6) < TOL
    assert abs(wexpand.p_from_single(3) - 0.5) < TOL
    table = wexpand.cross_validate(5, workers=2)
    assert len(table) == 18
    assert all(row["abs_delta"] <= TOL for row in table)

    # Measurement on W2: each branch has probability 1/2; H branch of a
    # removed mode leaves |V> on the survivor.
    w2 = wexpand.ideal_w(2)
    h, v = w2.measure("2", remove=True)
    assert abs(h.probability - 0.5) < TOL and abs(v.probability - 0.5) < TOL
    assert abs(h.state.amplitudes[1] - 1.0) < TOL

    # Gate registry round trip.
    assert "CH" in wexpand.gate_names()
    ch = wexpand.gate_matrix("CH")
    assert abs(ch[1][1] - r) < TOL and abs(ch[3][3] + r) < TOL

    # JSON round trip through the native serializer.
    reloaded = wexpand.PureState.from_json(doubled.state.to_json())
    assert reloaded.norm_squared() == doubled.state.norm_squared()

    print("wexpand python bindings: all smoke checks passed")


if __name__ == "__main__":
    main()
