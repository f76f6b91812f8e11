"""Required displacement for a 1e-9 classical BER versus fiber length (0 to 50 km)."""

from __future__ import annotations

import numpy as np

from _common import parser, pyplot, write_csv
from simulqkd.noise_budget import ber_bpsk, required_displacement
from simulqkd.phase_space import SystemParams


def main() -> None:
    p = parser(__doc__)
    p.add_argument("--L-max", type=float, default=50.0)
    p.add_argument("--step", type=float, default=0.5)
    args = p.parse_args()

    base = SystemParams()
    lengths = np.arange(0.0, args.L_max + args.step / 2, args.step)
    rows = []
    for L in lengths:
        params = base.replace(L=float(L))
        alpha = required_displacement(params)
        rows.append([float(L), alpha, alpha**2, float(ber_bpsk(alpha, params))])
    write_csv(args.out, ["L_km", "alpha", "mu", "ber_check"], rows)

    if args.plot:
        plt = pyplot()
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(lengths, [r[1] for r in rows])
        ax.set_xlabel("fiber length L (km)")
        ax.set_ylabel(r"required displacement $\alpha$")
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)


if __name__ == "__main__":
    main()
