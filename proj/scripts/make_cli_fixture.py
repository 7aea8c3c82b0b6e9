#!/usr/bin/env python3
"""Regenerate the small Testland fixture used by the CLI integration tests.

The series is produced by the solver's own recurrences under a constant
parameter vector, rounded to integer counts, so the fit smoke test has an
exactly-representable target.

Run from the repository root:  python3 scripts/make_cli_fixture.py
"""

import datetime

BETA, EPSILON, GAMMA, MU = 0.4, 0.22, 0.12, 0.003
S, E, I, R, D = 1_000_000.0 - 500.0, 0.0, 500.0, 0.0, 5.0
DAYS = 28
SUBSTEPS = 5

def step(h):
    global S, E, I, R, D
    n = S + E + I + R
    S = S / (1.0 + h * BETA * I / n)
    E = (E + h * BETA * S * I / n) / (1.0 + h * EPSILON)
    I = (I + h * EPSILON * E) / (1.0 + h * (GAMMA + MU))
    R = R + h * GAMMA * I
    D = D + h * MU * I

def main():
    conf, dead = [round(I)], [round(D)]
    for _ in range(DAYS):
        for _ in range(SUBSTEPS):
            step(1.0 / SUBSTEPS)
        conf.append(max(round(I), conf[-1]))
        dead.append(max(round(D), dead[-1]))

    start = datetime.date(2020, 1, 22)
    dates = ",".join(
        f"{(start + datetime.timedelta(days=k)).month}/"
        f"{(start + datetime.timedelta(days=k)).day}/"
        f"{(start + datetime.timedelta(days=k)).strftime('%y')}" for k in range(DAYS + 1))
    with open("tests/fixtures/cli_confirmed.csv", "w") as f:
        f.write("Province/State,Country/Region,Lat,Long," + dates + "\n")
        f.write(",Testland,5.0,5.0," + ",".join(map(str, conf)) + "\n")
    with open("tests/fixtures/cli_deaths.csv", "w") as f:
        f.write("Province/State,Country/Region,Lat,Long," + dates + "\n")
        f.write(",Testland,5.0,5.0," + ",".join(map(str, dead)) + "\n")
    print("confirmed:", conf[:4], "...", conf[-2:])
    print("deaths:   ", dead[:4], "...", dead[-2:])

if __name__ == "__main__":
    main()
