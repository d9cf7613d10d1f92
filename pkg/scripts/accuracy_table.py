"""Print the per-vertex AAPC / steady-state / exact table for a fixture.

    python3 scripts/accuracy_table.py --fixture figure2 --digits 6
"""

import argparse

from imkit import harness


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixture", choices=harness.FIXTURES, default="figure2")
    ap.add_argument("--p", type=float, default=None)
    ap.add_argument("--T", type=int, default=6)
    ap.add_argument("--digits", type=int, default=6)
    args = ap.parse_args()

    g = harness.load_dataset(args.fixture, args.p)
    table = harness.accuracy_report(g, harness.fixture_seeds(args.fixture, g), args.T)
    widths = [max(len(h), args.digits + 2) for h in table.header()]
    print("  ".join(h.rjust(w) for h, w in zip(table.header(), widths)))
    for row in table.rows():
        cells = [str(row[0])] + [f"{x:.{args.digits}f}" for x in row[1:]]
        print("  ".join(c.rjust(w) for c, w in zip(cells, widths)))


if __name__ == "__main__":
    main()
