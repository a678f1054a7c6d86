"""Recompute every oracle value and write tests/frozen_oracles.json.

The oracles in tests/oracles.py do not use the kstab numerical core; the
only package inputs are the generator matrices of the test models, which
are plain data.
"""

from __future__ import annotations

import json
import sys
from math import pi
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402
from kstab.kahler_models import projective_model  # noqa: E402

BUMP = {"m": 3, "scale": 1.0, "beta": 0.3}
TORIC_LAMBDAS = [[3, -1, -1, -1], [2, 1, -1, -2], [1, 2, 0, -3], [0, 1, -1, 0]]
TORIC_EPS = [0.05, 0.1]


def main(out: Path = ROOT / "tests" / "frozen_oracles.json") -> dict:
    doc = {"burns_simanca": {}, "toric_futaki": [], "gram": {}, "bumped": {}}
    for m in (3, 4, 5):
        d = oracles.bs_coefficients(m)
        doc["burns_simanca"][str(m)] = {"d0": float(d[0]), "d1": float(d[1]), "d2": float(d[2]),
                                        "exact": [str(x) for x in d]}
    for lam in TORIC_LAMBDAS:
        for eps in TORIC_EPS:
            val = oracles.toric_futaki(lam, 1.0, 3, eps ** 2 / (2 * pi))
            doc["toric_futaki"].append({"lambda": lam, "eps": eps, "m": 3, "scale": 1.0,
                                        "value": val, "eps4_coefficient": val / eps ** 4})
    model = projective_model([1, 2], [1.0, 2.0])
    gram = oracles.qmc_gram(model.dims, model.scales, model.algebra.generators)
    doc["gram"] = {"dims": [1, 2], "scales": [1.0, 2.0], "group": "torus",
                   "matrix": gram.tolist(), "method": "scrambled Sobol, 2^18 points"}
    m, a, beta = BUMP["m"], BUMP["scale"], BUMP["beta"]
    lams = [np.eye(m + 1)[j] - np.eye(m + 1)[j + 1] for j in range(m)]
    fut = []
    for lam in lams:
        est, err = oracles.bumped_futaki_qmc(lam, m, a, beta)
        fut.append({"lambda": lam.tolist(), "rule": oracles.bumped_futaki(lam, m, a, beta),
                    "monte_carlo": est, "monte_carlo_stderr": err,
                    "l1_scale": oracles.bumped_futaki_scale(lam, m, a, beta)})
    doc["bumped"] = dict(BUMP, futaki=fut,
                         extremal=oracles.bumped_extremal_ls(lams, m, a, beta).tolist())
    out.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    print(f"wrote {out}")
    return doc


if __name__ == "__main__":
    main()
