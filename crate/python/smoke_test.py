"""Smoke test for the `ltsp` extension module.

Run with the built library on PYTHONPATH, e.g. after
`cargo build --release -p ltsp-py && cp target/release/libltsp.so python/ltsp.so`.
"""

import os
import tempfile

import ltsp


def main():
    tape = ltsp.Tape([2, 3, 1])
    assert tape.length == 6 and tape.num_files == 3
    assert tape.extent(1) == (3, 5)

    reqs = [(0, 0), (2, 0)]
    assert ltsp.solve("fgs", tape, reqs) == [(2, 2)]
    assert ltsp.evaluate(tape, reqs, []) == 17
    assert ltsp.evaluate(tape, reqs, [(2, 2)]) == 9

    total, trace = ltsp.simulate("ltfs", tape, [(0, 0), (2, 2), (2, 4)], trace=True)
    assert total == 22
    assert trace.splitlines()[0] == "0\tmove\tfrom=6 to=0"

    alg, ref, ratio = ltsp.adversary("ltfs", 10)
    assert (alg, ref) == (1200, 210) and abs(ratio - 1200 / 210) < 1e-12

    t2, r2 = ltsp.gen_synthetic(50, 1, 3)
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "x.ltsp")
        ltsp.write_instance(path, t2, r2)
        t3, r3 = ltsp.read_instance(path)
        assert t3.sizes() == t2.sizes() and r3 == r2

    try:
        ltsp.solve("bogus", tape, reqs)
    except ValueError:
        pass
    else:
        raise AssertionError("unknown algorithm accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
