#!/usr/bin/env python3
"""Generate the synthetic fixtures in data/synthetic/.

ipsc_like.swf  two weeks of batch jobs on a 128-node single-CPU machine:
               power-of-two sizes, short median runtimes with a heavy tail,
               and user sessions that submit runs of jobs back to back.
ws_demand.csv  two weeks of web-service instance demand (peak 64) with a
               daily cycle and short match-day spikes, so the peak-to-mean
               ratio is high.

The output is deterministic for a given --seed.
"""

import argparse
import math
from pathlib import Path

import numpy as np

DAY = 86400
DURATION = 14 * DAY
NODES = 128
UNIX_START = 749458803  # 1993-10-01 00:00:03 PDT

SIZES = np.array([1, 2, 4, 8, 16, 32, 64, 128])
SIZE_WEIGHTS = np.array([0.30, 0.14, 0.13, 0.13, 0.12, 0.11, 0.06, 0.01])


def daily_activity(t):
    """Relative submission intensity: busy working hours, quiet nights and weekends."""
    hour = (t % DAY) / 3600.0
    weekday = (t // DAY) % 7 < 5
    shape = 0.15 + 0.85 * math.exp(-((hour - 14.0) ** 2) / (2 * 3.5 ** 2))
    return shape * (1.0 if weekday else 0.35)


def gen_jobs(rng, target_jobs):
    jobs = []
    t = 0.0
    mean_gap = DURATION / (target_jobs / 6.0)
    while True:
        # Thinning against the daily activity curve.
        t += rng.exponential(mean_gap * 0.39)
        if t >= DURATION:
            break
        if rng.random() > daily_activity(t):
            continue
        size = int(rng.choice(SIZES, p=SIZE_WEIGHTS / SIZE_WEIGHTS.sum()))
        count = rng.geometric(1.0 / 6.0)
        short_session = rng.random() < 0.66
        s = t
        for _ in range(count):
            if short_session:
                runtime = int(np.clip(rng.lognormal(math.log(90), 0.9), 5, 3000))
            else:
                runtime = int(np.clip(rng.lognormal(math.log(700), 1.2), 30, 3 * 3600))
            if size == NODES:
                # Whole-machine runs are short benchmark jobs.
                runtime = min(runtime, 900)
            if s >= DURATION:
                break
            jobs.append((int(s), runtime, size))
            # The user waits for the job, then thinks a little.
            s += runtime + rng.exponential(60.0)
    jobs.sort(key=lambda j: j[0])
    return jobs


def write_swf(path, jobs):
    with open(path, "w") as out:
        out.write("; Version: 2.2\n")
        out.write("; Computer: synthetic 128-node single-CPU machine\n")
        out.write(f"; UnixStartTime: {UNIX_START}\n")
        out.write(f"; MaxNodes: {NODES}\n")
        out.write(f"; MaxProcs: {NODES}\n")
        out.write("; Note: generated by tools/gen_synthetic.py\n")
        for i, (submit, runtime, size) in enumerate(jobs, start=1):
            fields = [i, submit, 0, runtime, size, -1, -1, size, runtime, -1, 1, 1, 1, -1, 1, -1, -1, -1]
            out.write(" ".join(str(f) for f in fields) + "\n")


def gen_ws(rng):
    step = 300
    times = np.arange(0, DURATION, step)
    hour = (times % DAY) / 3600.0
    base = 4.0 + 6.0 * np.exp(-((hour - 15.0) ** 2) / (2 * 4.0 ** 2))
    growth = 1.0 + 0.6 * times / DURATION
    demand = base * growth + rng.normal(0.0, 0.8, size=times.size)
    # Match days: a few sharp spikes lasting one to three hours.
    for _ in range(9):
        start = rng.integers(0, DURATION - 4 * 3600)
        length = int(rng.integers(3600, 3 * 3600))
        height = rng.uniform(18, 50)
        mask = (times >= start) & (times < start + length)
        ramp = np.sin(np.pi * (times[mask] - start) / length)
        demand[mask] += height * ramp
    peak_at = int(np.argmax(demand))
    demand = np.clip(np.rint(demand), 2, None)
    demand = np.rint(demand * 64.0 / demand.max())
    demand[peak_at] = 64
    demand = np.clip(demand, 2, 64).astype(int)
    samples = []
    for t, d in zip(times, demand):
        if not samples or samples[-1][1] != d:
            samples.append((int(t), int(d)))
    return samples


def write_ws(path, samples):
    with open(path, "w") as out:
        out.write("time,demand\n")
        for t, d in samples:
            out.write(f"{t},{d}\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=19931001)
    parser.add_argument("--jobs", type=int, default=2650, help="approximate job count")
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "synthetic")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    jobs = gen_jobs(rng, args.jobs)
    write_swf(args.out / "ipsc_like.swf", jobs)
    samples = gen_ws(rng)
    write_ws(args.out / "ws_demand.csv", samples)

    runtimes = np.array([j[1] for j in jobs])
    sizes = np.array([j[2] for j in jobs])
    util = float((runtimes * sizes).sum()) / (NODES * DURATION)
    series = np.zeros(DURATION // 300)
    for (t, d), nxt in zip(samples, samples[1:] + [(DURATION, 0)]):
        series[t // 300: nxt[0] // 300] = d
    print(f"jobs={len(jobs)} mean_runtime={runtimes.mean():.0f}s mean_size={sizes.mean():.1f} util={util:.1%}")
    print(f"ws samples={len(samples)} peak={series.max():.0f} mean={series.mean():.1f}")


if __name__ == "__main__":
    main()
