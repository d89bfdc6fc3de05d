#!/usr/bin/env python3
"""Generate the 1,000-row stand-in cohort and its schema.

The public cohort CSV is not bundled with this repository. This script writes a
deterministic stand-in with the same 22-column layout whose per-class age
moments and binary-indicator rates match the published original-data moments
(age (49.01, 20.98) suicide / (54.63, 23.01) not suicide, and the eight
psychiatric indicators). Every other column is invented but plausible.

Usage: make_standin_cohort.py OUT_DIR
"""

import csv
import json
import pathlib
import sys

import numpy as np

SEED = 20231016
N_PER_CLASS = 500

AGE_TARGET = {1: (49.01, 20.98), 0: (54.63, 23.01)}

# (suicide rate, non-suicide rate)
BINARY_RATES = {
    "Past suicide attempts": (0.29, 0.05),
    "Any suicidal thoughts mentioned": (0.54, 0.08),
    "Self-injurious behaviour": (0.40, 0.05),
    "Anger": (0.82, 0.10),
    "Sleep problem": (0.88, 0.37),
    "Social isolation": (0.77, 0.08),
    "Depression": (0.74, 0.06),
    "Humiliated": (0.67, 0.05),
}

CATEGORICAL = {
    "Gender": (
        ["Female", "Male"],
        [0.30, 0.70],
        [0.52, 0.48],
    ),
    "Religion": (
        ["Buddhist", "Hindu", "Muslim", "Christian", "Other or none"],
        [0.35, 0.20, 0.12, 0.23, 0.10],
        [0.30, 0.20, 0.15, 0.28, 0.07],
    ),
    "Race": (
        ["Group A", "Group B", "Group C", "Other"],
        [0.55, 0.25, 0.12, 0.08],
        [0.50, 0.28, 0.14, 0.08],
    ),
    "Nature of occupation": (
        ["Unemployed", "Agriculture and forestry", "Police and security",
         "Administrative and managerial", "Professional", "Clerical",
         "Sales and services", "Skilled trades", "Student", "Retired"],
        [0.22, 0.16, 0.01, 0.03, 0.06, 0.08, 0.12, 0.14, 0.08, 0.10],
        [0.08, 0.07, 0.06, 0.10, 0.14, 0.13, 0.13, 0.11, 0.08, 0.10],
    ),
    "Civil status": (
        ["Single", "Married", "Divorced", "Widowed"],
        [0.35, 0.35, 0.18, 0.12],
        [0.28, 0.48, 0.10, 0.14],
    ),
    "Education level": (
        ["Grade 1-7", "Grade 8-9", "Grade 10-11", "O/L passed",
         "A/L passed", "Diploma", "University degree or above"],
        [0.30, 0.18, 0.15, 0.14, 0.10, 0.08, 0.05],
        [0.08, 0.10, 0.14, 0.16, 0.17, 0.15, 0.20],
    ),
    "Lifetime psychiatric hospitalisations": (
        ["None", "Once", "Twice", "Three or more"],
        [0.50, 0.25, 0.15, 0.10],
        [0.82, 0.12, 0.04, 0.02],
    ),
    "Psychiatric disorders": (
        ["None", "Depressive disorder", "Bipolar disorder", "Schizophrenia",
         "Anxiety disorder", "Other"],
        [0.30, 0.28, 0.12, 0.10, 0.12, 0.08],
        [0.70, 0.08, 0.04, 0.04, 0.08, 0.06],
    ),
    "Past illnesses": (
        ["None", "Cardiovascular", "Diabetes", "Cancer", "Chronic pain",
         "Other"],
        [0.40, 0.15, 0.15, 0.10, 0.12, 0.08],
        [0.35, 0.18, 0.15, 0.12, 0.12, 0.08],
    ),
    "Alcohol/drug consumption": (
        ["None", "Alcohol", "Drugs", "Alcohol and drugs"],
        [0.45, 0.30, 0.12, 0.13],
        [0.65, 0.22, 0.07, 0.06],
    ),
}

FEATURE_ORDER = [
    "Age", "Gender", "Religion", "Race", "Nature of occupation",
    "Civil status", "Education level", "Lifetime psychiatric hospitalisations",
    "Past suicide attempts", "Any suicidal thoughts mentioned",
    "Self-injurious behaviour", "Psychiatric disorders", "Past illnesses",
    "Alcohol/drug consumption", "Anger", "Sleep problem", "Social isolation",
    "Depression", "Humiliated",
]

DEATH_REASONS = {
    1: (["family disputes", "mental disorders", "physical disabilities",
         "chronic diseases", "financial problems", "love affair failure",
         "unemployment and debt", "harassment at work"],
        [0.22, 0.20, 0.14, 0.14, 0.12, 0.08, 0.06, 0.04]),
    0: (["chronic diseases", "heart attack", "physical disabilities",
         "road accident", "old age", "cancer", "mental disorders",
         "kidney failure"],
        [0.24, 0.18, 0.14, 0.12, 0.12, 0.10, 0.06, 0.04]),
}


def exact_counts(probs, n):
    raw = np.array(probs) * n
    counts = np.floor(raw).astype(int)
    remainder = raw - counts
    for idx in np.argsort(-remainder, kind="stable")[: n - counts.sum()]:
        counts[idx] += 1
    return counts


def categorical_column(rng, probs, n):
    codes = np.repeat(np.arange(len(probs)), exact_counts(probs, n))
    rng.shuffle(codes)
    return codes


def ages_with_moments(rng, mean, std, n):
    ages = np.clip(np.rint(rng.normal(mean, std, n)), 12, 95).astype(int)
    for _ in range(200000):
        cur_mean, cur_std = ages.mean(), ages.std()
        if abs(cur_mean - mean) < 0.004 and abs(cur_std - std) < 0.004:
            return ages
        if abs(cur_mean - mean) >= 0.004:
            step = 1 if cur_mean < mean else -1
            i = rng.integers(n)
            if 12 <= ages[i] + step <= 95:
                ages[i] += step
            continue
        widen = cur_std < std
        hi = rng.integers(n)
        lo = rng.integers(n)
        if ages[hi] < ages[lo]:
            hi, lo = lo, hi
        if ages[hi] == ages[lo]:
            continue
        if widen and ages[hi] < 95 and ages[lo] > 12:
            ages[hi] += 1
            ages[lo] -= 1
        elif not widen and ages[hi] - ages[lo] >= 2:
            ages[hi] -= 1
            ages[lo] += 1
    raise RuntimeError("age moments did not converge")


def build_class(rng, label):
    n = N_PER_CLASS
    cols = {}
    mean, std = AGE_TARGET[label]
    cols["Age"] = ages_with_moments(rng, mean, std, n)
    for name, (_, p1, p0) in CATEGORICAL.items():
        cols[name] = categorical_column(rng, p1 if label else p0, n)
    # Psychiatric indicators share a latent severity so they co-occur within
    # a class while keeping exact per-class rates.
    severity = rng.normal(size=n)
    for name, (r1, r0) in BINARY_RATES.items():
        count = int(round((r1 if label else r0) * n))
        score = 0.8 * severity + rng.normal(size=n)
        hot = np.zeros(n, dtype=int)
        hot[np.argsort(-score, kind="stable")[:count]] = 1
        cols[name] = hot
    reasons, probs = DEATH_REASONS[label]
    cols["Death reason"] = [reasons[i] for i in categorical_column(rng, probs, n)]
    return cols


def main():
    out_dir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/cohort")
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)

    rows = []
    for label in (1, 0):
        cols = build_class(rng, label)
        for i in range(N_PER_CLASS):
            row = {name: str(int(cols[name][i])) for name in FEATURE_ORDER}
            row["Death reason"] = cols["Death reason"][i]
            row["Suicide"] = str(label)
            rows.append(row)
    order = rng.permutation(len(rows))
    rows = [rows[i] for i in order]

    # A few unrecorded demographics, left for imputation.
    for col in ("Religion", "Race", "Civil status"):
        for i in rng.choice(len(rows), size=3, replace=False):
            rows[i][col] = "?"

    header = ["Patient ID"] + FEATURE_ORDER + ["Death reason", "Suicide"]
    with open(out_dir / "cohort.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for pid, row in enumerate(rows, start=1):
            writer.writerow([f"P{pid:04d}"] + [row[h] for h in header[1:]])

    features = []
    for name in FEATURE_ORDER:
        if name == "Age":
            features.append({"name": name, "kind": "numeric", "range": [0, 120]})
        elif name in BINARY_RATES:
            features.append({
                "name": name, "kind": "categorical",
                "categories": [{"code": 0, "label": "No"},
                               {"code": 1, "label": "Yes"}],
            })
        else:
            labels = CATEGORICAL[name][0]
            features.append({
                "name": name, "kind": "categorical",
                "categories": [{"code": c, "label": l}
                               for c, l in enumerate(labels)],
            })
    schema = {
        "format_version": 1,
        "features": features,
        "label_name": "Suicide",
        "text_columns": ["Death reason"],
        "dropped_columns": ["Patient ID"],
    }
    with open(out_dir / "schema.json", "w", encoding="utf-8") as fh:
        json.dump(schema, fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    main()
