import argparse
import csv
import math
import time

from bqt.circuit import build_bqt_circuit, default_init
from bqt.coherent_core import ChannelParams
from bqt.protocol import TriggerPhase
from bqt.simulator import run_exact


def time_run(p: float, n: int, m: int, method: str) -> tuple[float, int]:
    """Return ``(elapsed, outcomes)`` for one exact run with ``method``."""
    params = ChannelParams(p, n, m)
    triggers = TriggerPhase(0.0, math.pi)
    circuit = build_bqt_circuit(params, triggers)
    init = default_init(params)
    start = time.perf_counter()
    hist = run_exact(circuit, init, method=method)
    return time.perf_counter() - start, len(hist.outcomes)


def run_trials(p_values: list[float], n: int, m: int, trials: int) -> list[dict]:
    results = []
    for p in p_values:
        for method in ("ensemble", "density"):
            for i in range(trials):
                elapsed, outcomes = time_run(p, n, m, method)
                results.append(
                    {
                        "p": p,
                        "n": n,
                        "m": m,
                        "method": method,
                        "trial": i + 1,
                        "time_seconds": round(elapsed, 6),
                        "outcomes": outcomes,
                    }
                )
    return results


def save_csv(results: list[dict], path: str) -> None:
    fieldnames = ["p", "n", "m", "method", "trial", "time_seconds", "outcomes"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(results)


def main() -> None:
    parser = argparse.ArgumentParser(description="Benchmark the ten-qubit circuit simulator")
    parser.add_argument("p", type=float, nargs="+", help="overlap values")
    parser.add_argument("--n", type=int, default=3, help="mode count")
    parser.add_argument("--m", type=int, default=1, help="parity index")
    parser.add_argument("--trials", type=int, default=1, help="trials per method")
    parser.add_argument(
        "--csv", type=str, default="benchmark_results.csv", help="output CSV file"
    )
    args = parser.parse_args()

    results = run_trials(args.p, args.n, args.m, args.trials)
    for r in results:
        print(
            f"p={r['p']} method={r['method']} trial={r['trial']} "
            f"time={r['time_seconds']:.4f}s outcomes={r['outcomes']}"
        )
    save_csv(results, args.csv)
    print(f"Results saved to {args.csv}")


if __name__ == "__main__":  # pragma: no cover - manual use
    main()
