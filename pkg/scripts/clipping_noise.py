"""Clipping noise of a 10-bit ADC versus the mean of the received Gaussian, for several V_B."""

from __future__ import annotations

import numpy as np

from _common import parser, pyplot, write_csv
from simulqkd.noise_budget import clipping_noise


def main() -> None:
    p = parser(__doc__)
    p.add_argument("--x-m", type=float, default=10.0, help="ADC full-scale amplitude")
    p.add_argument("--v-b", default="0.25,0.5,1,2", help="comma-separated V_B values")
    p.add_argument("--points", type=int, default=201)
    args = p.parse_args()

    v_bs = [float(v) for v in args.v_b.split(",")]
    alpha_prime = np.linspace(0.0, args.x_m, args.points)
    curves = [clipping_noise(alpha_prime, v, args.x_m) for v in v_bs]
    header = ["alpha_prime"] + [f"eps_c_V_B_{v:g}" for v in v_bs]
    rows = [[float(a), *(float(c[i]) for c in curves)] for i, a in enumerate(alpha_prime)]
    write_csv(args.out, header, rows)

    if args.plot:
        plt = pyplot()
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for v, c in zip(v_bs, curves):
            ax.semilogy(alpha_prime, np.maximum(c, 1e-300), label=f"$V_B$ = {v:g}")
        ax.set_xlabel(r"$\alpha'$")
        ax.set_ylabel(r"$\epsilon_c$ (SNU)")
        ax.set_ylim(1e-12, None)
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)


if __name__ == "__main__":
    main()
