# scratch tuner, not part of the package
import sys
import time

import numpy as np

from tendonhand.calibration import calibrated_default_hand
from tendonhand.grasp_taxonomy import run_scenario, taxonomy_catalog

hand = calibrated_default_hand()
only = {int(a) for a in sys.argv[1:]} if len(sys.argv) > 1 else None
t0 = time.time()
for sc in taxonomy_catalog():
    if only and sc.grasp_class.id not in only:
        continue
    t1 = time.time()
    try:
        res = run_scenario(hand, sc)
    except Exception as e:
        print(f"{sc.grasp_class.id:2d} {sc.grasp_class.name:28s} EXC: {e}")
        continue
    dt = time.time() - t1
    marks = " ".join(f"{k}={'Y' if v else 'N'}" for k, v in res.criteria_report.items())
    print(
        f"{sc.grasp_class.id:2d} {sc.grasp_class.name:28s} {res.verdict:8s} [{marks}] {dt:5.1f}s"
    )
    for c in res.contacts:
        print(f"     {c.link:18s} gap={c.gap:8.4f} n={np.round(c.normal,2)}")
print("total", time.time() - t0, "s")
