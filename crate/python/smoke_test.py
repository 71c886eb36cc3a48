#!/usr/bin/env python3
"""Smoke test for the umeb23_py extension module.

Build the module first:

    cargo build -p umeb23-py --release   # or omit --release for a debug build

then run this script with the same Python the module was built against:

    python3 python/smoke_test.py
"""

import json
import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libumeb23_py.so", "umeb23_py.so", "libumeb23_py.dylib")
    ]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        sys.exit("build the extension first: cargo build -p umeb23-py")
    stage = Path(tempfile.mkdtemp(prefix="umeb23-"))
    shutil.copy2(lib, stage / "umeb23_py.so")
    sys.path.insert(0, str(stage))
    import umeb23_py

    return umeb23_py


def main():
    m = load_module()
    print(f"umeb23_py {m.version()}")

    # Example 1 reconstructs and verifies end to end, exactly.
    params = m.example_params(1)
    assert json.loads(params)["s_branch"] == "-"
    pair_json = m.build_pair_json(
        params, first_basis=m.example_first_basis(1), backend="exact"
    )
    report = json.loads(m.verify_pair_json(pair_json))
    assert report["overall"] is True, report
    mandatory = [c for c in report["checks"] if c["mandatory"]]
    assert all(c["residual"] <= 1e-9 for c in mandatory)
    print(f"example 1 verified: {len(mandatory)} mandatory checks, all pass")

    # The BasisPair class mirrors the JSON path.
    bp = m.BasisPair.from_json(pair_json)
    assert bp.backend() == "exact"
    amps = bp.amplitudes("second", 4)
    assert len(amps) == 6
    assert math.isclose(sum(abs(a) ** 2 for a in amps), 1.0, abs_tol=1e-12)
    assert json.loads(bp.verify())["overall"] is True

    # Audits: example 1 reproduces, examples 2 and 3 do not (exact verdict).
    v1 = json.loads(m.audit_example(1))["verdict"]
    assert v1["claim_reproduced"] is True
    for n in (2, 3):
        v = json.loads(m.audit_example(n))["verdict"]
        assert v["printed_conditions_pass"] is True
        assert v["w_unitary"] is False
        assert v["mutually_unbiased"] is True
        assert v["claim_reproduced"] is False
    print("audits adjudicated: example 1 reproduces, 2 and 3 fail unitarity")

    # Deterministic sampling; every sample verifies.
    samples = m.sample_params(7, 4, exact_grid=True)
    assert samples == m.sample_params(7, 4, exact_grid=True)
    for s in samples:
        r = json.loads(m.verify_pair_json(m.build_pair_json(s), grid_oracle=False))
        assert r["overall"] is True
    print(f"{len(samples)} sampled parameter sets verified")

    # Schmidt analysis of a maximally entangled and a product state.
    s = 1 / math.sqrt(2)
    coeffs, rank = m.schmidt_profile([s, 0, 0, 0, s * 1j, 0])
    assert rank == 2
    assert math.isclose(coeffs[0], s, abs_tol=1e-12)
    assert math.isclose(coeffs[1], s, abs_tol=1e-12)
    coeffs, rank = m.schmidt_profile([0, 0, 1, 0, 0, 0])
    assert rank == 1 and math.isclose(coeffs[0], 1.0, abs_tol=1e-12)

    # Degenerate input is rejected, not repaired.
    try:
        m.verify_pair_json("{}")
    except ValueError:
        pass
    else:
        sys.exit("expected a ValueError for a malformed pair document")

    print("smoke test ok")


if __name__ == "__main__":
    main()
