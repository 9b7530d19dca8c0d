"""Reflection surface R(alpha, omega) and resonance / width / asymmetry per alpha."""
import argparse
import warnings
from pathlib import Path

import numpy as np

from polaron_wqed.cli import emit_table
from polaron_wqed.model import ModelParams
from polaron_wqed.polaron import solve_self_consistent
from polaron_wqed.scattering import compute_lineshape


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/sweep")
    ap.add_argument("--omega-c", type=float, default=100.0)
    ap.add_argument("--n-alpha", type=int, default=30)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    surface, summary = [], []
    for alpha in np.linspace(0.01, 0.3, args.n_alpha).tolist():
        params = ModelParams(alpha=alpha, omega_c=args.omega_c)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ls = compute_lineshape(params, sol=solve_self_consistent(params), n_points=600)
        surface += [{"alpha": alpha, "omega": w, "R": r} for w, r in zip(ls.omegas, ls.reflectivities)]
        summary.append({"alpha": alpha, "delta_tilde": ls.delta_tilde, "omega_reson": ls.omega_reson,
                        "fwhm": ls.fwhm, "alpha_lower": ls.alpha_lower, "asymmetry": ls.asymmetry})
    emit_table(surface, out / "surface.csv")
    emit_table(summary, out / "summary.csv")
    for row in summary[::5]:
        print({k: round(v, 4) if isinstance(v, float) else v for k, v in row.items()})


if __name__ == "__main__":
    main()
