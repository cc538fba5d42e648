"""Smoke test for the ctxhist Python extension.

Build and install first:
    pip install --no-build-isolation -e crates/py
"""

import json
import math

import ctxhist


def main():
    contexts, singlet = ctxhist.peres_setup()
    alpha, beta, gamma, delta, eps, xi = contexts
    assert [c.name for c in contexts] == ["α", "β", "γ", "δ", "ε", "ξ"]

    back = ctxhist.Context.from_json(xi.to_json())
    assert back.id == xi.id and back.vectors == xi.vectors

    i_blocks, j_blocks = ctxhist.finest_partitions(alpha, delta)
    assert i_blocks == [[0, 2], [1, 3]] and j_blocks == [[0, 2], [1, 3]]

    values, vectors = ctxhist.jacobi_eigh([[0, 1], [1, 0]])
    assert [round(v, 12) for v in values] == [-1.0, 1.0]
    assert len(vectors) == 2

    h = 1 / math.sqrt(2)
    residual, det = ctxhist.symplectic_volume_check([[h, h], [h * 1j, -h * 1j]])
    assert residual < 1e-12 and abs(det - 1) < 1e-12

    zz = ctxhist.Observable([[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]])
    assert zz.eigenvalues == [-1.0, 1.0] and zz.is_stable_in(gamma)

    ens = ctxhist.Ensemble(singlet, xi, epsilon=0.3, seed=7, n_samples=5000).extend(gamma)
    assert ens.history == ["ξ", "γ"] and len(ens) == 5000
    assert set(ens.values(zz)) == {-1.0}
    assert ens.values(zz) == ens.values_pullback(zz)
    assert abs(ens.expectation(zz) + 1) < 1e-12
    assert abs(sum(ens.masses()) - 1) < 1e-12
    assert all(label in (2, 3) for label in ens.labels())
    dump = json.loads(ens.dump_json())
    assert len(dump["samples"]) == 5000

    try:
        ens.extend(gamma)
    except ValueError:
        pass
    else:
        raise AssertionError("repeated context accepted")

    peres = json.loads(ctxhist.peres_report(n_samples=20000, seed=3))
    assert peres["passed"] and peres["product_value"] == -1.0
    remark = json.loads(ctxhist.remark_report(n_samples=5000))
    assert remark["passed"]
    for suite in ("gfunc", "ntrns", "symplectic"):
        assert json.loads(ctxhist.check_suite(suite, trials=5))["violations"] == 0

    print("smoke test passed")


if __name__ == "__main__":
    main()
