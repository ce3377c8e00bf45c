"""Run every BER preset, the PEP-vs-N sweep and the complexity table.

    python scripts/reproduce_curves.py --scale desk --workers 4
    python scripts/reproduce_curves.py --scale full      # 20000 packets, hours

Writes CSVs and per-curve .dat files under results/<scale>/.
"""
import argparse
import logging
import time
from pathlib import Path

from relaysim.analysis import ComplexityModel, mmd_op_count, qn_op_count
from relaysim.experiment import (
    emit_csv,
    emit_pep_csv,
    emit_plot_data,
    load_config,
    run_campaign,
    run_pep_campaign,
)

ROOT = Path(__file__).resolve().parents[1]
log = logging.getLogger("reproduce")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--scale", choices=["desk", "full"], default="desk")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--pep-slots", type=int, default=10_000)
    ap.add_argument("--out", type=Path, default=ROOT / "results")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    out = args.out / args.scale
    out.mkdir(parents=True, exist_ok=True)
    for cfg_path in sorted((ROOT / "configs").glob(f"{args.scale}_*.yaml")):
        t0 = time.time()
        records = run_campaign(load_config(cfg_path), workers=args.workers)
        stem = cfg_path.stem.removeprefix(f"{args.scale}_")
        emit_csv(records, out / f"ber_{stem}.csv")
        emit_plot_data(records, out / f"ber_{stem}")
        log.info("%s: %d cells in %.0f s", stem, len(records), time.time() - t0)

    pep = run_pep_campaign([3, 5, 10], [0, 2, 4, 6, 8, 10, 12], slots=args.pep_slots,
                           workers=args.workers)
    emit_pep_csv(pep, out / "pep_vs_n.csv")
    emit_plot_data(pep, out / "pep_vs_n")
    log.info("PEP sweep done")

    with open(out / "complexity.csv", "w") as fh:
        fh.write("m,n,w,x,mmd_add,mmd_mul,qn_add,qn_mul\n")
        for m in range(1, 5):
            X, add, mul = mmd_op_count(ComplexityModel(3, m, 1))
            fh.write(",".join(map(str, (m, 3, 1, X, add, mul, *qn_op_count(3, m)))) + "\n")


if __name__ == "__main__":
    main()
