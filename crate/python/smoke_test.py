#!/usr/bin/env python3
"""Smoke test for the flpc_py extension module.

Build the module first with `cargo build -p flpc-py` (or --release); this
script locates the compiled library under target/ and imports it directly.
"""

import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libflpc_py.so", "flpc_py.so", "libflpc_py.dylib")
    ]
    built = next((c for c in candidates if c.exists()), None)
    if built is None:
        sys.exit("flpc_py library not found; run `cargo build -p flpc-py` first")
    staging = Path(tempfile.mkdtemp(prefix="flpc_py_"))
    shutil.copy(built, staging / "flpc_py.so")
    sys.path.insert(0, str(staging))
    import flpc_py

    return flpc_py


def main():
    flpc_py = load_module()

    # parse + canonical printing round trip
    src = (REPO / "programs" / "meal.flp").read_text()
    prog = flpc_py.parse(src, "meal.flp")
    assert flpc_py.parse(str(prog)).check() == []

    # safety analysis: meal is safe, an unrestricted assignment is not
    assert prog.check() == []
    bad = flpc_py.parse("f(Z) := 0.")
    assert bad.check() != []

    # translation produces function-free rules mentioning the holds relation
    rules = prog.translate()
    assert "holds_first(" in rules
    assert flpc_py.parse(src).translate(intermediate=True) != rules

    # both solving methods agree on the canonical single model
    models = prog.solve()
    assert models == ["first=pasta second=fish"], models
    assert prog.solve(method="translate") == models
    assert prog.compare()

    # typed programs: 3-colouring a triangle has six answer sets, and the
    # embedding into the untyped language agrees after solving
    typed = flpc_py.parse_typed((REPO / "programs" / "colouring3.fasp").read_text())
    answers = typed.solve()
    assert len(answers) == 6, answers
    embedded = typed.embed()
    assert "in {" in str(embedded)
    assert embedded.check() == []

    # random generation is deterministic and produces safe programs
    a, b = flpc_py.random_program(7), flpc_py.random_program(7)
    assert str(a) == str(b)
    assert a.check() == []
    assert a.compare()

    # syntax errors surface as ValueError
    try:
        flpc_py.parse("p(.")
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError for syntax error")

    print("smoke test passed")


if __name__ == "__main__":
    main()
