"""Run the standard experiments and write their reports to a results directory.

Each experiment is one CLI invocation, so the files written here are exactly
what ``kstab`` produces from the command line:

* verdict for every shipped demo,
* eps sweeps of s-bar, volume, the Futaki invariant and the inner product of
  an orthogonal pair on the fixed-point P^3 demo,
* the curvature-decay fit of the glued metric,
* the radial Burns-Simanca profile for m = 3, 4, 5.

A summary table is printed at the end.

    python3 scripts/run_sweeps.py --out results
"""

from __future__ import annotations

import argparse
import io
import json
from contextlib import redirect_stdout
from dataclasses import dataclass, field
from math import sqrt
from pathlib import Path

from kstab.cli_reports import main as kstab

DEMOS = ("balanced_p3", "p1p2_demo", "p3_fixed", "p3_unstable", "p1cubed_unstable",
         "p1cubed_semistable")


def _diag(*d) -> str:
    n = len(d)
    return json.dumps([[[d[i] if i == j else 0 for j in range(n)] for i in range(n)]])


S6 = sqrt(6)


@dataclass
class SweepConfig:
    out: Path = Path("results")
    eps_grid: str = "0.02,0.03,0.05,0.07,0.1"
    sweep_model: str = "p3_fixed"
    xi: str = field(default_factory=lambda: _diag(3, -1 + S6, -1 - S6, -1))
    eta: str = field(default_factory=lambda: _diag(3, -1 - S6, -1 + S6, -1))
    profile_dims: tuple = (3, 4, 5)


def run(cfg: SweepConfig) -> list[tuple[str, int, str]]:
    cfg.out.mkdir(parents=True, exist_ok=True)
    rows = []

    def call(name: str, *argv: str) -> None:
        path = cfg.out / f"{name}.json"
        code = kstab([*argv, "--out", str(path)])
        doc = json.loads(path.read_text()) if path.exists() else {}
        rows.append((name, code, _headline(doc.get("result", doc))))

    for demo in DEMOS:
        call(f"verdict_{demo}", "verdict", "--model", demo)
    for quantity in ("sbar", "volume"):
        call(f"sweep_{quantity}", "sweep", "--model", cfg.sweep_model, "--quantity", quantity,
             "--eps-grid", cfg.eps_grid)
    call("sweep_futaki", "sweep", "--model", cfg.sweep_model, "--quantity", "futaki",
         "--xi", _diag(3, -1, -1, -1), "--eps-grid", cfg.eps_grid)
    call("sweep_inner_product", "sweep", "--model", cfg.sweep_model,
         "--quantity", "inner-product", "--xi", cfg.xi, "--eta", cfg.eta,
         "--eps-grid", cfg.eps_grid)
    call("decay", "decay", "--model", cfg.sweep_model, "--eps-grid", "0.02,0.05,0.1")
    for m in cfg.profile_dims:
        stem = cfg.out / f"profile_m{m}"
        with redirect_stdout(io.StringIO()):
            code = kstab(["bs-solve", "--m", str(m), "--out", str(stem)])
        head = json.loads(stem.with_suffix(".json").read_text())
        rows.append((f"profile_m{m}", code, f"d0={head['d0']:.6g} d1={head['d1']:.6g}"))
    return rows


def _headline(result: dict) -> str:
    if "verdict" in result:
        return f"verdict={result['verdict']}"
    if "slope" in result:
        ref = result.get("reference_slope")
        return f"slope={result['slope']:.4f}" + (f" (reference {ref})" if ref else "")
    return ""


def parse_args(argv=None) -> SweepConfig:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=SweepConfig.out)
    ap.add_argument("--eps-grid", default=SweepConfig.eps_grid)
    ns = ap.parse_args(argv)
    return SweepConfig(out=ns.out, eps_grid=ns.eps_grid)


if __name__ == "__main__":
    for name, code, line in run(parse_args()):
        print(f"{name:28s} exit={code}  {line}")
