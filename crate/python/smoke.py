"""Smoke test for the Python bindings.

Build with `cargo build --release -p semicrossed-py`, then run
`python3 python/smoke.py`; the script finds the compiled library under
target/release and imports it as `semicrossed_py`.
"""

import importlib.machinery
import importlib.util
import pathlib
import sys


def load():
    root = pathlib.Path(__file__).resolve().parent.parent
    for name in ("libsemicrossed_py.so", "libsemicrossed_py.dylib", "semicrossed_py.dll"):
        path = root / "target" / "release" / name
        if path.exists():
            loader = importlib.machinery.ExtensionFileLoader("semicrossed_py", str(path))
            spec = importlib.util.spec_from_file_location("semicrossed_py", path, loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    import semicrossed_py

    return semicrossed_py


def main():
    sc = load()
    doubling = sc.System.circle(2)
    assert doubling.classify("1/3") == ("periodic", 2, 0)
    assert doubling.classify("1/2") == ("eventually_periodic", 1, 1)
    assert doubling.apply("2/3") == "1/3"
    assert sorted(doubling.preimages("1/3")) == ["1/6", "2/3"]

    desc, cls, period = doubling.lift("1/3", "tail=1.0")
    assert (cls, period) == ("periodic", 2), desc

    f = doubling.element("1+U")
    lower, upper, witness = f.norm()
    assert abs(lower - 2) < 1e-9 and abs(upper - 2) < 1e-6 and witness == "periodic"

    u = doubling.element("U")
    m = u.rep_matrix("periodic:1/3:1")
    assert m == [[0, 1], [1, 0]], m

    g = doubling.element("cos(1)")
    assert (u.adjoint() * g * u) == g.alpha()
    assert (g * u) == (u * g.alpha())
    assert doubling.element("U*cos(1)@3").pushdown(2).is_semicrossed

    golden = sc.System.sft([[1, 1], [1, 0]])
    props = {name: (b, e) for name, b, e in golden.properties()}
    assert all(b == e for b, e in props.values()), props

    rows = sc.verify("covariance", golden, cases=5)
    assert rows and all(r[4] for r in rows)

    try:
        doubling.classify("3/2")
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range point accepted")

    print("smoke ok:", doubling, golden, f, (lower, upper, witness))
    return 0


if __name__ == "__main__":
    sys.exit(main())
