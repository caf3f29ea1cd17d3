"""Writes a stand-in for the public telecom churn CSV: same quoting and label
spelling ("True."/"False."), categorical columns mixed in, and 17 numeric
attribute columns."""

import numpy as np

NUMERIC = [
    "account length", "area code", "number vmail messages",
    "total day minutes", "total day calls", "total day charge",
    "total eve minutes", "total eve calls", "total eve charge",
    "total night minutes", "total night calls", "total night charge",
    "total intl minutes", "total intl calls", "total intl charge",
    "customer service calls", "tenure months",
]
CATEGORICAL = ["state", "phone number", "international plan", "voice mail plan"]


def write_churnlike_csv(path, rows=3334, seed=0):
    rng = np.random.default_rng(seed)
    churn = rng.random(rows) < 0.145
    header = CATEGORICAL[:1] + NUMERIC[:2] + CATEGORICAL[1:] + NUMERIC[2:] + ["churn"]
    lines = [",".join(header)]
    for i in range(rows):
        nums = rng.normal(100, 30, len(NUMERIC)) + 40 * churn[i] * (np.arange(len(NUMERIC)) % 3 == 0)
        nums = np.round(nums, 2)
        cat = ["KS", f"{rng.integers(300, 500)}-{rng.integers(1000, 9999)}",
               "yes" if rng.random() < 0.1 else "no", "no"]
        cells = cat[:1] + [repr(float(v)) for v in nums[:2]] + cat[1:] + [repr(float(v)) for v in nums[2:]]
        cells.append(" True." if churn[i] else " False.")
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")
    return path
