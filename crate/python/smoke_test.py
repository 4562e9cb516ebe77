"""Smoke test for the niqb extension module.

Build and install first:
    pip install maturin
    cd crates/python && maturin build --release -o dist && pip install dist/niqb-*.whl
"""

import math

import niqb


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    db = niqb.Database()
    assert len(db) == 34, len(db)
    assert "193Ir" in db.ids()
    ir = db.record("193Ir")
    assert ir["scheme"] == "TwoLevel", ir["scheme"]

    beta, gamma, x = niqb.solve_resonance(80240.0, 80240.0 / 6.4653288259870241)
    assert abs(gamma - 3.31) < 0.01, gamma
    assert close(beta, (x * x - 1) / (x * x + 1), 1e-12)

    intensity = niqb.calibrate_pi_pulse(16.4662, 0.1, x)
    assert close(niqb.pulse_area(16.4662, intensity, 0.1, x), math.pi, 1e-12)

    run = db.simulate("193Ir")
    s = run.summary
    assert close(s["E_sta_eV"], 80240.0, 1e-3), s["E_sta_eV"]
    assert abs(s["t_sta_ps"] - 0.09) <= 0.01, s["t_sta_ps"]
    assert len(run) == 2001 and len(run.populations) == 2
    assert all(0.999 <= p <= 1.0 + 1e-9 for p in run.purity)

    gd = db.simulate("154Gd", overrides={"pump_intensity": 4e22}, snapshots=201)
    assert len(gd.times) == 201
    assert gd.summary["E_sta_eV"] > 0.5 * 123e3

    levels = [0.0, 1.0]
    plus = [[0.5, 0.5], [0.5, 0.5]]
    assert abs(niqb.ergotropy(plus, levels) - 0.5) < 1e-12
    mixed = [[0.3, 0.0], [0.0, 0.7]]
    assert abs(niqb.ergotropy(mixed, levels) - 0.4) < 1e-12
    assert abs(niqb.purity(mixed) - 0.58) < 1e-12
    assert abs(niqb.stored_energy([[0.5, 0.5j], [-0.5j, 0.5]], levels) - 0.5) < 1e-12

    grid = db.sweep("154Gd", [1e21, 1e23], [1e20, 1e22], jobs=2)
    assert len(grid["cells"]) == 4

    try:
        db.simulate("999Zz")
    except KeyError:
        pass
    else:
        raise AssertionError("unknown nuclide accepted")
    try:
        db.simulate("193Ir", overrides={"pump_intensty": 1.0})
    except ValueError:
        pass
    else:
        raise AssertionError("misspelled override accepted")

    print(f"niqb {niqb.__version__}: smoke test passed (193Ir E_sta = {s['E_sta_eV']:.2f} eV)")


if __name__ == "__main__":
    main()
