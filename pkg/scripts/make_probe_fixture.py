"""Write the planted expression fixture as a TSV the loader accepts."""

import argparse

import numpy as np

from sambandit.geneprobe import ExpressionDataset, make_planted_fixture, save_expression

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("path")
parser.add_argument("--seed", type=int, default=0)
parser.add_argument("--n-probes", type=int, default=2000)
parser.add_argument("--n-signal", type=int, default=50)
parser.add_argument("--raw-counts", action="store_true",
                    help="write expm1 of the values, to be read back with --raw-counts")
args = parser.parse_args()

ds = make_planted_fixture(n_probes=args.n_probes, n_signal=args.n_signal, seed=args.seed)
if args.raw_counts:
    ds = ExpressionDataset(np.expm1(ds.values), ds.m1, ds.m2, ds.probe_ids, ds.class_labels)
save_expression(ds, args.path)
print(f"wrote {ds.n_probes} probes x {ds.d} samples to {args.path}")
