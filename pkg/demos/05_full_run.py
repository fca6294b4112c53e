"""Run every stage end to end with the mock provider, then re-run.

The second call finds every stage finished in the manifest and makes no
provider calls.

Run:  python demos/05_full_run.py [out_dir]
"""

import json
import sys
from pathlib import Path

from causal_elicit.llm_gateway import Gateway
from causal_elicit.pipeline import PipelineConfig, run_pipeline

out = sys.argv[1] if len(sys.argv) > 1 else "runs"
cfg = PipelineConfig(out=out)
bundle = run_pipeline("Trade policy and the yen", cfg)

run_dir = Path(out) / "trade-policy-and-the-yen"
manifest = json.loads((run_dir / "manifest.json").read_text())
print("stages:", manifest["stage_status"])
print("matrix shape:", manifest["matrix_shape"], "dropped:", len(manifest["dropped_columns"]))
print(f"PC edges {bundle.pc.n_edges}, GES edges {bundle.ges.n_edges}, "
      f"LiNGAM edges {len(bundle.lingam.edge_list())}")
print("artifacts:", sorted(str(p.relative_to(run_dir)) for p in run_dir.rglob("*") if p.is_file()))

gw = Gateway(cfg.provider_config())
run_pipeline("Trade policy and the yen", cfg, gateway=gw)
print("provider calls on re-run:", gw.calls)
print()
print((run_dir / "report.md").read_text()[:1500])
