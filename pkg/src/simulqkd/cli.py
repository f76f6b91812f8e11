"""Command-line entry point.

Subcommands::

    simulqkd budget         single-point noise budget table
    simulqkd alpha-sweep    required displacement and noise terms vs a swept parameter
    simulqkd keyrate-sweep  key rate vs a swept parameter, one column per sigma_phi
    simulqkd simulate       Monte Carlo run with estimated BER, channel and key rate

Every parameter may come from ``--config FILE`` (``key = value`` lines) and be
overridden by a flag of the same name, e.g. ``--L 25 --sigma_phi 1e-5``.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical-domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ALL_KEYS, MODES, PARAM_KEYS, ConfigError, RunConfig, build_run_config, read_config_file
from .noise_budget import ber_bpsk, compute_budget
from .phase_space import ParameterError
from .security import NumericalDomainError, link_key_rate
from .simulation import iter_chunks, simulate

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if value is None:
        return "auto"
    return format(float(value), ".12g")


def metadata_lines(cfg: RunConfig) -> list[str]:
    lines = [f"# simulqkd {__version__}", f"# mode = {cfg.mode}"]
    for name in PARAM_KEYS:
        lines.append(f"# {name} = {fmt(getattr(cfg.params, name))}")
    if cfg.sweep is not None and cfg.mode.endswith("sweep"):
        lines.append(f"# sweep = {cfg.sweep.name}:{','.join(fmt(v) for v in cfg.sweep.values)}")
    if cfg.mode == "keyrate-sweep":
        lines.append(f"# sigma_phi_list = {','.join(fmt(v) for v in cfg.sigma_phi_list)}")
        lines.append(f"# floor_rate = {fmt(cfg.floor_rate)}")
    if cfg.mode == "simulate":
        for key in ("n_pulses", "master_seed", "workers", "chunk_size"):
            lines.append(f"# {key} = {fmt(getattr(cfg, key))}")
    lines.append(f"# strict_noise_mode = {fmt(cfg.strict_noise_mode)}")
    return lines


def _csv_text(cfg: RunConfig, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write("\n".join(metadata_lines(cfg)) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _point(cfg: RunConfig, value: float):
    name = cfg.sweep.name
    return cfg.params.replace(**{name: int(value) if name == "M" else value, "alpha": None})


def run_budget(cfg: RunConfig) -> str:
    b = compute_budget(cfg.params, cfg.strict_noise_mode)
    rows = [
        ("T_ch", cfg.params.T_ch, "-"),
        ("alpha_required", b.alpha_required, "abs"),
        ("alpha", b.alpha, "abs"),
        ("mu", b.alpha**2, "photons"),
        ("alpha_prime", b.alpha_prime, "abs"),
        ("V_B", b.V_B, "abs"),
        ("eps_c", b.eps_c, "SNU"),
        ("eps_d", b.eps_d, "SNU"),
        ("eps_p", b.eps_p, "SNU"),
        ("eps_total", b.eps_total, "SNU"),
        ("ber", b.ber, "-"),
    ]
    lines = metadata_lines(cfg)
    lines.append(f"{'quantity':<16}{'value':>20}  unit")
    lines += [f"{name:<16}{fmt(value):>20}  {unit}" for name, value, unit in rows]
    return "\n".join(lines) + "\n"


def run_alpha_sweep(cfg: RunConfig) -> str:
    header = [cfg.sweep.column, "alpha", "alpha_prime", "eps_c", "eps_d", "eps_p", "ber_check"]
    rows = []
    for value in cfg.sweep.values:
        params = _point(cfg, value)
        b = compute_budget(params, cfg.strict_noise_mode)
        rows.append([value, b.alpha, b.alpha_prime, b.eps_c, b.eps_d, b.eps_p, ber_bpsk(b.alpha, params)])
    return _csv_text(cfg, header, rows)


def run_keyrate_sweep(cfg: RunConfig) -> str:
    if not cfg.sigma_phi_list:
        raise ConfigError("sigma_phi_list: empty list")
    header = [cfg.sweep.column]
    header += [f"R_sigma_phi_{fmt(s)}" for s in cfg.sigma_phi_list]
    header += [f"positive_rate_sigma_phi_{fmt(s)}" for s in cfg.sigma_phi_list]
    rows = []
    for value in cfg.sweep.values:
        base = _point(cfg, value)
        rates = [link_key_rate(base.replace(sigma_phi=s), cfg.strict_noise_mode).R for s in cfg.sigma_phi_list]
        shown = [max(r, 0.0) for r in rates] if cfg.floor_rate else rates
        rows.append([value, *shown, *(r > 0 for r in rates)])
    return _csv_text(cfg, header, rows)


def run_simulate(cfg: RunConfig) -> str:
    res = simulate(cfg.params, cfg.n_pulses, cfg.master_seed, cfg.workers, cfg.chunk_size)
    s, r = res.stats, res.report
    items = [
        ("alpha", res.alpha),
        ("n_pulses", s.n_pulses),
        ("n_bit_errors", s.n_bit_errors),
        ("ber_hat", s.ber_hat),
        ("ber_ci_95_low", s.ber_ci_95[0]),
        ("ber_ci_95_high", s.ber_ci_95[1]),
        ("ber_analytic", ber_bpsk(res.alpha, cfg.params)),
        ("t_eta_hat", s.t_eta_hat),
        ("t_eta_configured", cfg.params.T_eta),
        ("eps_hat", s.eps_hat),
        ("corr_ab", s.corr_ab),
        ("I_AB", r.I_AB),
        ("chi_BE", r.chi_BE),
        ("R", r.R),
    ]
    items += [(f"lambda_{i}", lam) for i, lam in enumerate(r.lambdas, 1)]
    lines = metadata_lines(cfg) + [f"{k} = {fmt(v)}" for k, v in items]
    return "\n".join(lines) + "\n"


def write_records(cfg: RunConfig, path: str) -> None:
    """Per-pulse CSV of the simulate run; regenerated chunk by chunk from the same seeds."""
    tmp = Path(path + ".tmp")
    with tmp.open("w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(metadata_lines(cfg)) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "m_A", "x_A", "p_A", "amp_x", "amp_p", "basis", "raw", "m_B", "key_value"])
        index = 0
        for pulses, det in iter_chunks(cfg.params, cfg.n_pulses, cfg.master_seed, cfg.chunk_size):
            ax, ap = pulses.amp_x, pulses.amp_p
            for i in range(len(pulses)):
                writer.writerow([
                    index,
                    int(pulses.m_A[i]),
                    fmt(pulses.x_A[i]),
                    fmt(pulses.p_A[i]),
                    fmt(ax[i]),
                    fmt(ap[i]),
                    "X" if det.basis[i] == 0 else "P",
                    fmt(det.raw[i]),
                    int(det.m_B[i]),
                    fmt(det.key_value[i]),
                ])
                index += 1
    tmp.replace(path)


RUNNERS = {
    "budget": run_budget,
    "alpha-sweep": run_alpha_sweep,
    "keyrate-sweep": run_keyrate_sweep,
    "simulate": run_simulate,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def create_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="simulqkd", description="Simultaneous BPSK + CV-QKD link analysis and simulation")
    parser.add_argument("--version", action="version", version=f"simulqkd {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("-v", "--verbose", action="store_true")
        for key in ALL_KEYS:
            p.add_argument(f"--{key}", dest=key, metavar="VALUE", default=None)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    entries = read_config_file(args.config) if args.config else {}
    for key in ALL_KEYS:
        value = getattr(args, key)
        if value is not None:
            entries[key] = value
    return build_run_config(args.mode, entries)


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    tmp = Path(path + ".tmp")
    tmp.write_text(text, encoding="utf-8", newline="\n")
    tmp.replace(path)


def main(argv: list[str] | None = None) -> int:
    args = create_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args)
        text = RUNNERS[cfg.mode](cfg)
        _emit(text, cfg.output)
        if cfg.mode == "simulate" and cfg.records:
            write_records(cfg, cfg.records)
    except (ConfigError, ParameterError) as exc:
        print(f"simulqkd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalDomainError as exc:
        print(f"simulqkd: numerical-domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
