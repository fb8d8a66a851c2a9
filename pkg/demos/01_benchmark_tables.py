"""Run both benchmark tables and print them.

Each row is one leading order ``nu1``.  The observation is the exact space
integral plus first-type noise with ``delta = 0.04``; the pipeline is run
with its default settings.

    python demos/01_benchmark_tables.py
"""

from fracid.cli import experiment_rows


def show(title, header, rows):
    print(title)
    print("  ".join(f"{h:>13}" for h in header))
    for row in rows:
        print("  ".join(f"{'':>13}" if v is None else f"{v:13.5f}" for v in row))
    print()


if __name__ == "__main__":
    show("Benchmark 1 (type I, unknown constant rho2 = 0.25, nu2 = nu1/2)", *experiment_rows(1, "ftn"))
    show("Benchmark 2 (type II, three terms, nu3 = nu1/3)", *experiment_rows(2, "ftn"))
