#!/usr/bin/env python3
"""Generates data/sample_market.csv, the bundled synthetic market series.

Price follows a geometric random walk with daily log-return drift MU and
volatility SIGMA. The daily transaction count grows at TX_GROWTH per period
and tracks the price level with elasticity TX_ELASTICITY, plus independent
log-normal noise. The seed is fixed, so reruns produce a byte-identical file.

    python3 tools/gen_sample_market.py > data/sample_market.csv
"""

import datetime
import math
import random
import sys

SEED = 20170425
PERIODS = 500           # output periods; the file has PERIODS + 1 rows
START = datetime.date(2010, 8, 18)
START_PRICE = 100.0
MU = 0.002
SIGMA = 0.05
START_TX = 300
TX_ELASTICITY = 1.5
TX_NOISE = 0.03
TX_GROWTH = 0.006


def main(out):
    rng = random.Random(SEED)
    out.write("date,price,tx_count\n")
    log_price = math.log(START_PRICE)
    for i in range(PERIODS + 1):
        if i > 0:
            log_price += rng.gauss(MU, SIGMA)
        price = math.exp(log_price)
        tx_level = START_TX * math.exp(TX_GROWTH * i + TX_ELASTICITY * (log_price - math.log(START_PRICE)))
        tx = max(1, int(round(tx_level * math.exp(rng.gauss(0.0, TX_NOISE)))))
        day = START + datetime.timedelta(days=i)
        out.write(f"{day.isoformat()},{price:.6f},{tx}\n")


if __name__ == "__main__":
    main(sys.stdout)
