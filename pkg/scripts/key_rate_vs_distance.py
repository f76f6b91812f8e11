"""Asymptotic key rate versus fiber length for several phase-noise levels.

Prints the zero-crossing distance of each curve on stderr.
"""

from __future__ import annotations

import sys

import numpy as np

from _common import parser, pyplot, write_csv
from simulqkd.phase_space import SystemParams
from simulqkd.security import rate_curve, zero_crossing


def main() -> None:
    p = parser(__doc__)
    p.add_argument("--sigma-phi", default="1e-3,1e-4,1e-5,1e-6", help="comma-separated phase-noise variances")
    p.add_argument("--L-max", type=float, default=150.0)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--strict", action="store_true", help="add clipping and quantization noise to eps")
    args = p.parse_args()

    sigmas = [float(s) for s in args.sigma_phi.split(",")]
    lengths = np.arange(0.0, args.L_max + args.step / 2, args.step)
    base = SystemParams()
    curves = [rate_curve(base.replace(sigma_phi=s), lengths, args.strict) for s in sigmas]
    header = ["L_km"] + [f"R_sigma_phi_{s:g}" for s in sigmas]
    write_csv(args.out, header, [[float(L), *(float(c[i]) for c in curves)] for i, L in enumerate(lengths)])

    for s in sigmas:
        L0 = zero_crossing(base.replace(sigma_phi=s), L_max=300.0, strict=args.strict)
        print(f"sigma_phi = {s:g}: R reaches zero at {'beyond 300' if L0 is None else f'{L0:.4f}'} km", file=sys.stderr)

    if args.plot:
        plt = pyplot()
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for s, c in zip(sigmas, curves):
            mask = c > 0
            ax.semilogy(lengths[mask], c[mask], label=rf"$\sigma_\phi$ = {s:g}")
        ax.set_xlabel("fiber length L (km)")
        ax.set_ylabel("key rate (bits/pulse)")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)


if __name__ == "__main__":
    main()
