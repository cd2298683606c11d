"""Smoke test for the rmtwork_py extension.

Build and run:
    maturin develop --release -m crates/python/Cargo.toml
    python crates/python/python/smoke_test.py
"""

import math

import rmtwork_py as rw


def main():
    spec = rw.EnsembleSpec(200, "goe", 0.0, 0.1)
    assert abs(spec.radius - 2 * 200 * 0.1 / math.pi) < 1e-12
    levels = spec.sample_levels(seed=1)
    assert len(levels) == 200 and levels == sorted(levels)
    assert levels == spec.sample_levels(seed=1)

    gse = rw.EnsembleSpec(20, "gse", 0.0, 0.2)
    assert len(gse.sample_levels(seed=3)) == 20

    p = rw.QuenchParams(300, 0.1283, 0.1283 / 2, 24.0, 24.0, beta=0.01)
    assert abs(p.g(0.0) - 1) < 1e-12
    curve = p.g_curve([0.0, 0.5, 1.0])
    assert abs(curve[1] - p.g(0.5)) < 1e-15
    assert abs(p.g(-0.7) - p.g(0.7).conjugate()) < 1e-12
    w_star, delta_w = p.peak_width("beta0")
    assert abs(delta_w - 24.5) < 0.01
    assert abs(p.n_eff() / 300 - 2.6) < 0.05
    density = p.p_w([-10.0, 0.0, 10.0])
    assert all(x >= 0 for x in density)

    exp = rw.QuenchExperiment.figure(1)
    report = exp.run_single_draw(0)
    assert report["rms_to_analytic"] < 0.01
    assert report["jarzynski"]["rel_err"] < 1e-10
    assert len(report["curve"]["u"]) == 512

    small = rw.QuenchExperiment(rw.EnsembleSpec(40, "gue", 0.0, 0.5), rw.EnsembleSpec(40, "gue", 0.0, 0.25),
                                beta=0.1, n_draws=3, u_points=32)
    ens = small.run_ensemble()
    assert len(ens["rms_per_draw"]) == 3

    try:
        rw.EnsembleSpec(10, "abc")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown class accepted")

    assert rw.run_validation(seed=0)["passed"]
    print("rmtwork_py", rw.__version__, "smoke test ok")


if __name__ == "__main__":
    main()
