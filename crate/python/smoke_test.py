"""Smoke test for the pycoarsekit extension module.

Build and run from the repository root:

    cargo build -p pycoarsekit --features extension-module
    cp target/debug/libpycoarsekit.so python/pycoarsekit.so
    python3 python/smoke_test.py
"""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pycoarsekit as ck


def betti(groups):
    return [g.free_rank for g in groups]


def main():
    point = ck.Space.fixture("point")
    h = point.homology(max_dim=4)
    assert [str(g) for g in h] == ["Z", "0", "0", "0", "0"], h

    hexagon = ck.Space.fixture("hexagon")
    assert len(hexagon) == 6
    assert betti(hexagon.homology(max_dim=1, scale=1)) == [1, 1]
    per_scale, terminal = hexagon.qhomology([1], max_dim=2)
    assert betti(per_scale[0][1]) == [1, 1, 0] and betti(terminal) == [1, 0, 0]
    assert ck.Space.from_json(hexagon.to_json()) == hexagon

    path = ck.Space.explicit(
        ["a", "b", "c", "d"],
        [[("a", "b"), ("b", "c")]],
        [["a", "b", "c"], ["d"]],
    )
    assert path.coarse_components() == [["a", "b", "c"], ["d"]]
    assert betti(path.homology(max_dim=1)) == [2, 0]

    line = ck.Space.builtin("half_line", 100)
    shift = ck.Map.named(line, "shift")
    assert shift.is_morphism()
    assert shift.closeness(ck.Map.named(line, "identity")) == 1
    assert shift.certify_flasque(tested=["0..10"]) == [(0, 11)]

    window = ck.Space.builtin("int_window", 100)
    assert window.asdim_upper_bound([2, 4, 8]) == 1

    assert ck.invariant_factors([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]
    u, s, v = ck.snf([[1, 2], [3, 4]])
    assert [s[0][0], abs(s[1][1])] == [1, 2]

    code, out, _ = ck.run_cli(["homology", "--space", "hexagon", "--scale", "1", "--format", "json"])
    assert code == 0 and json.loads(out)["results"]["betti"][:2] == [1, 1]

    try:
        ck.Space.from_json('{"kind": "explicit"}')
    except ValueError:
        pass
    else:
        raise AssertionError("malformed document accepted")

    print("pycoarsekit smoke test passed")


if __name__ == "__main__":
    main()
