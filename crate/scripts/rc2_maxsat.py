#!/usr/bin/env python3
"""Solve a WCNF file with PySAT's RC2 and print o/s/v lines.

Usage: rc2_maxsat.py FILE.wcnf   (as `collage solve --solver "python3 scripts/rc2_maxsat.py"`)
"""
import sys

from pysat.examples.rc2 import RC2
from pysat.formula import WCNF


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    wcnf = WCNF(from_file=sys.argv[1])
    with RC2(wcnf) as rc2:
        model = rc2.compute()
        if model is None:
            print("s UNSATISFIABLE")
            return 0
        print(f"o {rc2.cost}")
        print("s OPTIMUM FOUND")
        values = {abs(l): l > 0 for l in model}
        lits = [str(v if values.get(v, False) else -v) for v in range(1, wcnf.nv + 1)]
        print("v " + " ".join(lits) + " 0")
    return 0


if __name__ == "__main__":
    sys.exit(main())
