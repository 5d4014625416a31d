"""Smoke test for the compiled extension module.

Build with `python3 python/build_ext.py` (or maturin), then run this file.
"""

import json
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import normattain as na

TPLUSI = {
    "kind": "sum",
    "children": [
        {"kind": "identity"},
        {
            "kind": "diagonal",
            "sequence": {
                "kind": "unit_modulus",
                "real_part": {"kind": "harmonic", "limit": 1, "coeff": 1, "offset": 1},
            },
        },
    ],
}


def main():
    t = na.Operator.from_json(json.dumps({"operator": TPLUSI}))
    assert na.Operator.from_json(t.to_json()).to_json() == t.to_json()

    r = na.operator_norm(t)
    assert abs(r["exact"] - 2.0) < 1e-12, r
    c = na.check_n(t)
    assert c["status"]["status"] == "NotAttained", c

    a = na.Operator.dense([[2, 1j], [-1j, 1]])
    assert na.check_n(a)["status"]["status"] == "Attained"
    assert a.apply([1, 0]) == [2, -1j]
    assert a.adjoint().truncate(2) == a.truncate(2)

    shift = na.Operator.from_json('{"kind":"shift","offset":1}')
    v = na.classify_an(shift.adjoint())
    assert v["verdict"] == "AN", v

    e = na.enan_counterexample(5)
    for n, got in enumerate(e["norm_sq"], start=1):
        want = 2 / 3 + (6 * n - 5) / (6 * (3 * (n - 1) + 2))
        assert abs(got - want) < 1e-12
    assert na.check_n(e["restriction"])["status"]["status"] == "NotAttained"
    assert na.classify_an(e["projection"])["verdict"] == "NotAN"

    d = na.deflate(na.Operator.dense([[3, 0, 0], [0, 2, 0], [0, 0, 1]]), 3, 3)
    assert d["betas"] == [3.0, 2.0, 1.0], d

    nil = na.Operator.dense([[0, 1], [0, 0]])
    pts = na.numrange_boundary(nil, 2, 16)
    assert all(abs(abs(z) - 0.5) < 1e-12 for _, z in pts)

    f = na.falsify_an(shift.adjoint(), 16, 10, 1)
    assert f["worst_gap"] <= 1e-6

    s = na.paper_suite()
    assert s["failed"] == 0, s
    assert not math.isnan(s["passed"])

    try:
        na.Operator.from_json('{"kind":"banana"}')
    except ValueError:
        pass
    else:
        raise AssertionError("unknown kind accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
