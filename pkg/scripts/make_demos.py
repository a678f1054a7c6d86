"""Regenerate the shipped demo models in src/kstab/demos/."""

from __future__ import annotations

import json
from pathlib import Path

from kstab.kahler_models import projective_model

DEMOS = {
    "balanced_p3": dict(dims=[3], scales=[1.0], group="torus", point=[[1, 1, 1, 1]]),
    "p1p2_demo": dict(dims=[1, 2], scales=[1.0, 2.0], group="torus",
                      point=[[1, 0.7], [1, 0.8, 1.3]]),
    "p3_fixed": dict(dims=[3], scales=[1.0], group="full", point=[[1, 0, 0, 0]]),
    "p3_unstable": dict(dims=[3], scales=[1.0], group="full", point=[[1, 1, 0, 0]]),
    "p1cubed_unstable": dict(dims=[1, 1, 1], scales=[1.0, 1.0, 1.0], group="diagonal",
                             point=[[1, 0], [1, 0], [1, 1]]),
    "p1cubed_semistable": dict(dims=[1, 1, 1], scales=[2.0, 1.0, 1.0], group="diagonal",
                               point=[[1, 0], [1, 1], [1, 1]]),
}


def main(out: Path = Path(__file__).resolve().parents[1] / "src" / "kstab" / "demos") -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, kw in DEMOS.items():
        model = projective_model(name=name, **kw)
        path = out / f"{name}.json"
        path.write_text(json.dumps(model.to_dict(), indent=1, sort_keys=True) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
