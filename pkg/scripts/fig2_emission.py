"""Spontaneous emission traces and emitted spectra for three couplings."""
import argparse
import warnings
from pathlib import Path

from polaron_wqed.cli import emit_table
from polaron_wqed.dynamics import default_emission_params, emission_run, fit_decay_rate, spectral_width


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/emission")
    ap.add_argument("--alphas", default="0.01,0.07,0.35")
    ap.add_argument("--t-max", type=float, default=30.0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = []
    for alpha in map(float, args.alphas.split(",")):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            trace = emission_run(default_emission_params(alpha), t_max=args.t_max)
        emit_table([{"t": t, "p_e": p} for t, p in zip(trace.times, trace.p_e)], out / f"trace_a{alpha:g}.csv")
        emit_table([{"omega": w, "n_k": n} for w, n in zip(trace.frequencies, trace.spectrum)],
                   out / f"spectrum_a{alpha:g}.csv")
        try:
            rate = fit_decay_rate(trace)
        except ValueError:
            rate = None
        summary.append({"alpha": alpha, "delta_tilde": trace.delta_tilde, "fitted_rate": rate,
                        "spectral_width": spectral_width(trace)})
        print(summary[-1])
    emit_table(summary, out / "summary.csv")


if __name__ == "__main__":
    main()
