#!/usr/bin/env python3
"""Regenerate the deterministic market/news fixtures under data/.

The market CSVs are synthetic daily paths anchored to the reference split
table: the split start date opens at the table's Open price and the split
end date opens at the table's Close price. Everything in between is a
smooth geometric bridge with a fixed sinusoidal wobble, so regeneration is
bit-stable (no RNG).
"""

import json
import math
import os
from datetime import date, timedelta

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")

SPLITS = [
    # asset, kind, start, end, open, close, trend_pct (as printed in the reference table)
    ("BTC", "validation", "2023-11-16", "2024-01-15", 37879.97, 42511.96, 12.23),
    ("BTC", "test_bull", "2024-01-24", "2024-03-13", 39877.59, 71631.35, 79.63),
    ("BTC", "test_bear", "2024-05-21", "2024-07-13", 71443.06, 59231.95, -17.09),
    ("ETH", "validation", "2023-11-10", "2024-01-08", 2121.06, 2333.03, 9.99),
    ("ETH", "test_bull", "2024-01-24", "2024-03-13", 2241.74, 4006.45, 78.72),
    ("ETH", "test_bear", "2024-05-27", "2024-07-08", 3826.13, 2929.86, -23.42),
    ("SOL", "validation", "2023-11-16", "2024-01-08", 65.53, 97.79, 49.18),
    ("SOL", "test_bull", "2024-01-24", "2024-03-13", 84.28, 151.02, 77.35),
    ("SOL", "test_bear", "2024-05-21", "2024-07-11", 186.51, 127.61, -15.53),
]

# per-asset scales for the auxiliary columns
SCALES = {
    "BTC": dict(volume=2.1e10, gas=0.00031, addr=940000, tvt=3.2e10),
    "ETH": dict(volume=1.2e10, gas=0.00215, addr=520000, tvt=8.9e9),
    "SOL": dict(volume=2.4e9, gas=0.00021, addr=1150000, tvt=2.1e9),
}

HISTORY_DAYS = 10  # calendar days of lead-in before each split start


def iso(d):
    return d.isoformat()


def parse(d):
    y, m, dd = (int(x) for x in d.split("-"))
    return date(y, m, dd)


def open_path(p_start, p_end, n_days, history):
    """Opens for days -history..n_days, anchored exactly at both split ends."""
    opens = {}
    ratio = p_end / p_start
    for i in range(n_days + 1):
        t = i / n_days
        wobble = 0.025 * math.sin(math.pi * t) * math.sin(6.0 * math.pi * t + 0.7)
        opens[i] = p_start * (ratio ** t) * math.exp(wobble)
    opens[0] = p_start
    opens[n_days] = p_end
    for j in range(1, history + 1):
        opens[-j] = p_start * math.exp(-0.004 * j + 0.008 * math.sin(0.9 * j))
    return opens


def write_market_csv(path, asset, start, end, p_open, p_close, history=HISTORY_DAYS):
    d0, d1 = parse(start), parse(end)
    n = (d1 - d0).days
    opens = open_path(p_open, p_close, n, history)
    s = SCALES[asset]
    rows = []
    idxs = list(range(-history, n + 1))
    for i in idxs:
        day = d0 + timedelta(days=i)
        o = opens[i]
        c = opens[i + 1] if (i + 1) in opens else o
        k = i + history
        vol = s["volume"] * (1.0 + 0.18 * math.sin(0.31 * k + 1.1))
        gas = s["gas"] * (1.0 + 0.25 * math.sin(0.47 * k + 0.3))
        addr = int(s["addr"] * (1.0 + 0.08 * math.sin(0.23 * k + 2.0)))
        tvt = s["tvt"] * (1.0 + 0.22 * math.sin(0.39 * k + 0.9))
        rows.append(
            f"{iso(day)},{o:.2f},{c:.2f},{vol:.0f},{gas:.6f},{addr},{tvt:.0f}"
        )
    with open(path, "w") as f:
        f.write("date,open,close,volume,avg_gas_fee,unique_addresses,total_value_transferred\n")
        f.write("\n".join(rows) + "\n")


def write_news(path, asset, start, titles):
    d0 = parse(start)
    arts = []
    for k, (offset, title, body, source) in enumerate(titles):
        arts.append(
            {
                "date": iso(d0 + timedelta(days=offset)),
                "title": title,
                "body": body,
                "source": source,
                "url": f"https://news.example/{asset.lower()}/{k}",
            }
        )
    with open(path, "w") as f:
        json.dump(arts, f, indent=2)
        f.write("\n")


def main():
    os.makedirs(DATA, exist_ok=True)
    os.makedirs(os.path.join(DATA, "fixtures"), exist_ok=True)

    for asset, kind, start, end, p_open, p_close, _trend in SPLITS:
        name = f"{asset.lower()}_{kind}.csv"
        write_market_csv(os.path.join(DATA, name), asset, start, end, p_open, p_close)

    write_news(
        os.path.join(DATA, "btc_test_bull_news.json"),
        "BTC",
        "2024-01-24",
        [
            (0, "Spot ETF inflows accelerate as trading volumes climb",
             "Exchange data shows sustained net inflows into newly listed spot products, with daily volumes at multi-month highs.",
             "Market Wire"),
            (0, "Analyst says the rally is far from over",
             "A widely followed strategist argues that momentum and on-chain activity point to further upside this quarter.",
             "Crypto Daily"),
            (1, "Mining difficulty reaches a new record",
             "The network difficulty adjustment came in at an all-time high, reflecting continued hash-rate growth.",
             "Chain Monitor"),
            (3, "Large holders move coins to cold storage",
             "On-chain trackers flagged several large transfers out of exchange wallets, a pattern often read as accumulation.",
             "Chain Monitor"),
            (4, "Options desks report heavy call buying",
             "Dealers describe one-sided flows in short-dated calls as sentiment turns euphoric.",
             "Derivatives Watch"),
        ],
    )

    write_news(
        os.path.join(DATA, "btc_test_bear_news.json"),
        "BTC",
        "2024-05-21",
        [
            (0, "Regulators signal tougher enforcement stance",
             "Officials outlined plans for stricter oversight of exchanges, weighing on sentiment across major assets.",
             "Policy Desk"),
            (1, "Trader warns of overheated leverage",
             "A derivatives trader says funding rates look stretched and expects a washout of long positions.",
             "Crypto Daily"),
            (1, "Exchange reserves tick higher",
             "Coins moving onto exchanges outpaced withdrawals for a third straight day, per on-chain data.",
             "Chain Monitor"),
            (4, "Macro funds trim risk ahead of data week",
             "Portfolio managers cite rate uncertainty as a reason to cut crypto exposure into month-end.",
             "Market Wire"),
        ],
    )

    # Synthetic series for tuning tests: an up-trend with a 7-day ripple that
    # whipsaws short SMA windows. On the 60-trading-day split starting
    # 2025-01-01 the 10-day window maximizes total return by several points.
    def tune_open(k):
        return 100.0 * math.exp(0.004 * k) * (
            1
            + 0.05 * math.sin(2 * math.pi * k / 7 + 2.6)
            + 0.04 * math.sin(2 * math.pi * k / 23 + 0.5)
        )

    hist, ndays = 35, 60
    d0 = parse("2025-01-01")
    with open(os.path.join(DATA, "synthetic_tune.csv"), "w") as f:
        f.write("date,open,close,volume,avg_gas_fee,unique_addresses,total_value_transferred\n")
        for i in range(-hist, ndays + 1):
            k = i + hist
            day = d0 + timedelta(days=i)
            o = tune_open(k)
            c = tune_open(k + 1) if i < ndays else o
            f.write(f"{iso(day)},{o:.2f},{c:.2f},1200000000,0.000210,400000,900000000\n")

    with open(os.path.join(DATA, "constant_price.csv"), "w") as f:
        f.write("date,open,close,volume,avg_gas_fee,unique_addresses,total_value_transferred\n")
        for i in range(-hist, ndays + 1):
            day = d0 + timedelta(days=i)
            f.write(f"{iso(day)},250.00,250.00,1000000,0.000100,10000,5000000\n")

    # Scripted backend replies for demo runs: one list per agent, cycled per call.
    replies = {
        "by_agent": {
            "statistics": [
                "Over the recent window the open price has drifted higher on stable "
                "network activity; unique addresses and transferred value are flat to "
                "up, suggesting a mildly positive statistical trend."
            ],
            "fact": [
                "The factual items report record network fundamentals and sustained "
                "product inflows, which point to continued demand for the asset."
            ],
            "subjectivity": [
                "Commentary is optimistic bordering on euphoric; analysts expect "
                "further upside, though one-sided positioning is itself a risk signal."
            ],
            "fact_reasoning": [
                "Fundamentals and flows support staying invested: inflows, hash-rate "
                "growth, and accumulation patterns argue against reducing exposure."
            ],
            "subjectivity_reasoning": [
                "Sentiment supports the uptrend, but crowded optimism warrants "
                "moderation rather than aggressive adds at current levels."
            ],
            "reflection": [
                "Recent actions tracked the market direction. Maintain approximately "
                "60% weighting on factual information and 40% on subjectivity, and "
                "keep position changes moderate."
            ],
            "trade": [
                "1. Reasoning: Reports agree on a constructive trend with stretched sentiment.\n"
                "2. Factual vs Subjective Weighting: 0.6 factual, 0.4 subjective, per the reflection guidance.\n"
                "3. Risk Management: Scale in gradually and avoid full deployment while positioning is crowded.\n"
                "4. Action: 0.3",
                "1. Reasoning: Momentum intact but short-term froth argues for patience.\n"
                "2. Factual vs Subjective Weighting: 0.7 factual, 0.3 subjective.\n"
                "3. Risk Management: Hold current exposure and reassess tomorrow.\n"
                "4. Action: 0.0",
                "1. Reasoning: Crowded calls and rising exchange reserves tilt the balance toward caution.\n"
                "2. Factual vs Subjective Weighting: 0.5 factual, 0.5 subjective.\n"
                "3. Risk Management: Trim a small slice of the position to cut drawdown risk.\n"
                "4. Action: -0.2",
            ],
        },
        "cycle": True,
    }
    with open(os.path.join(DATA, "fixtures", "agent_replies.json"), "w") as f:
        json.dump(replies, f, indent=2)
        f.write("\n")

    print("fixtures written to", os.path.normpath(DATA))


if __name__ == "__main__":
    main()
