"""Smoke tests for the pybmo module; runs as a plain script."""

import pybmo


def test_exact_norms():
    X = pybmo.Space.grid_1d(8)
    f = [1.0] * 4 + [0.0] * 4
    assert pybmo.bmo_norm(X, f) == 0.5
    assert pybmo.dual_norm(X, f) == 0.5
    assert pybmo.bmo_norm(X, [3.25] * 8) == 0.0


def test_space_facts():
    X = pybmo.Space.grid_1d(8)
    assert X.n == 8
    assert X.ball_count() == 52
    cmu, cd = X.doubling()
    assert cmu == 3.0
    assert cd == 3.5
    Xn = X.normalized()
    assert Xn.diameter == 0.5


def test_choose_q():
    assert pybmo.choose_q(8.0, 2) == 24


def test_uchiyama_partition():
    lam = 2.0
    cd = 1.75 ** (1.0 / (4.0 * lam))
    X = pybmo.Space.grid_1d(8, 0.0, True)
    e1, e2 = [0, 1, 2, 3], [4, 5, 6, 7]
    fields, trivial = pybmo.uchiyama(X, [e1, e2], lam, q=5, cd=cd)
    assert not trivial
    for x in e1:
        assert fields[0][x] == 0.0
    for x in e2:
        assert fields[1][x] == 0.0
    sum_dev, range_dev, vanish_ok, c1 = pybmo.verify(X, fields, [e1, e2], lam)
    assert sum_dev <= 1e-12 and range_dev <= 1e-12 and vanish_ok
    assert c1 > 0.0
    dens, lam_max = pybmo.density(X, [e1, e2], cd)
    assert dens == 0.5 and lam_max >= lam


def test_identity_map():
    X = pybmo.Space.grid_1d(8)
    F = list(range(8))
    K, alpha = pybmo.fit_map(X, F, seed=7, trials=64)
    assert K == 1.0 and alpha == 1.0
    assert abs(pybmo.opnorm(X, F, seed=7) - 1.0) <= 1e-12
    measured, predicted, ok = pybmo.roundtrip(X, F, [0, 1, 2, 3], [4, 5, 6, 7])
    assert ok and measured <= predicted * (1 + 1e-9)


def test_majorant():
    assert abs(pybmo.stromberg_majorant() - 22.31) < 0.01


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    print(f"{len(tests)} smoke tests passed")


if __name__ == "__main__":
    main()
