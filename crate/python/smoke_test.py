"""Smoke test for the Python extension.

Build and run from the repository root:

    cargo build -p sphconv-py --release --features extension-module
    python3 python/smoke_test.py

The script looks for the compiled library under target/release and loads it
as the `sphconv` module; an already installed `sphconv` (e.g. via maturin)
is used when present.
"""

import importlib.machinery
import importlib.util
import math
import pathlib
import sys


def load():
    try:
        import sphconv

        return sphconv
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for name in ("libsphconv_py.so", "libsphconv_py.dylib", "sphconv_py.dll"):
        path = root / "target" / "release" / name
        if path.exists():
            loader = importlib.machinery.ExtensionFileLoader("sphconv", str(path))
            spec = importlib.util.spec_from_file_location("sphconv", path, loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("sphconv extension not found; build it with --features extension-module first")


def main():
    sc = load()

    bad = sc.QuadraticInstance.diagonal([1.0, 2.0, 3.0], [0.0, 0.0, 0.0])
    assert bad.n == 3
    assert sc.foc_slack(bad, [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]) == -2.0
    assert sc.soc_slack(bad, [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]) == 0.0
    assert abs(sc.restricted_lambda_min(bad.a, [0.0, 0.0, 1.0]) - 1.0) < 1e-12

    witness = sc.falsify(bad, budget=0)["witness"]
    assert witness["slack"] < 0.0

    good = sc.QuadraticInstance.diagonal([1.0, 1.0, 2.0], [0.0, 0.0, -2.0])
    battery = sc.run_battery(good)
    assert battery["verdict"] == "ProvesConvex", battery
    assert battery["decided_by"] == "iffdiag"

    report = sc.check(bad, samples=2000, seed=1)
    assert report["aggregate"] == "NonConvexCertified"
    assert report["schema"] == 1

    inst, meta = sc.generate("bipos", 4, seed=3)
    assert meta["target_certificate"] == "bipos"
    assert sum(1 for x in inst.b if x > 0) == 1
    assert sc.run_battery(inst)["verdict"] == "ProvesConvex"

    again, cone = sc.QuadraticInstance.from_json(inst.to_json())
    assert again.b == inst.b and cone.is_orthant()

    shifted = good.shift(2.5)
    assert math.isclose(shifted.lambda_min(), good.lambda_min() - 2.5)

    k = sc.Cone.generated([[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
    assert k.contains([1.0, 0.5, 0.0]) and not k.contains([-1.0, 0.0, 0.0])
    assert sc.falsify(bad, cone=k, budget=2000)["status"] == "FalsifiedNonConvex"

    try:
        sc.generate("spiral", 4)
    except ValueError as e:
        assert "family" in str(e)
    else:
        raise AssertionError("unknown family accepted")

    print("sphconv", sc.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
