"""Smoke test for the levy_passage extension module.

Build and install first, e.g. `maturin develop -m crates/py/Cargo.toml --release`.
"""

import math

import levy_passage as lp


def main() -> None:
    sym = lp.StableParams(0.7)
    assert abs(sym.positivity() - 0.5) < 1e-12
    psi = sym.characteristic_exponent(2.0)
    assert abs(psi - complex(-(2.0**0.7), 0.0)) < 1e-12, psi
    cp, cm = lp.StableParams.from_levy_constants(0.7, 1.0, 1.0).levy_constants()
    assert abs(cp - 1.0) < 1e-12 and abs(cm - 1.0) < 1e-12

    xs = sym.sample(1000, seed=1)
    assert xs == sym.sample(1000, seed=1) and len(xs) == 1000

    model = lp.LevyModel.stable(lp.StableParams.from_levy_constants(0.7, 1.0, 1.0))
    assert abs(model.rho() - 0.5) < 1e-12
    bounds = [lp.Boundary("constant"), lp.Boundary("increasing", 1.0)]
    horizons = [16.0, 32.0, 64.0, 128.0]
    est = lp.survival(model, bounds, horizons, 4000, seed=3, dt=0.5)
    assert len(est) == 2 and len(est[0]) == 4
    for const_point, inc_point in zip(est[0], est[1]):
        assert const_point["survivors"] <= inc_point["survivors"]
    fit = lp.fit_exponent(horizons, [e["survivors"] for e in est[0]], 4000)
    assert 0.2 < fit["rho_hat"] < 0.8, fit

    exact = lp.fit_exponent([1.0, 2.0, 4.0, 8.0], [8000, 4000, 2000, 1000], 10000)
    assert abs(exact["rho_hat"] - 1.0) < 1e-12

    assert abs(lp.kappa(0.5, 4.0) - 2.0) < 2e-3
    assert lp.delta(1e6) == min(1.0 / math.log(math.log(1e6)), 0.5)
    value, warning = lp.laplace_bound(0.5, 1e6, 1e-2)
    assert 0.0 < value < 1.0 and warning is None
    assert lp.integral_test(0.25) == ("convergent", 4.0)

    out = lp.run_config(
        "experiment.kind = integral-test\nintegral.gamma = 0.25\nrun.seed = 0\n"
    )
    assert out["csv"].splitlines()[0].startswith("experiment_id,kind,alpha")
    try:
        lp.run_config("experiment.kind = exponent\n")
    except ValueError as e:
        assert "run.seed" in str(e)
    else:
        raise AssertionError("missing seed accepted")
    print("levy_passage", lp.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
