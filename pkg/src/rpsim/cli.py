"""Command-line driver.

Subcommands: simulate (trajectory CSV), bounds (entropy-bound audit),
gamma-scan (violation vs relaxation ladder), sweep (magnetic-field sweep),
spectrum (Liouville eigenvalues).  Parameters come from a preset, an optional
flat key=value config file, and per-flag overrides, in that order.

Exit codes: 0 success; 2 configuration problem; 3 runtime invariant breach;
4 verdict mismatch under --expect (CI hook).
"""

import argparse
import sys

from .config import PRESETS, RunConfig, build_config
from .entropy import audit_bounds, gamma_scan
from .integrate import IntegrationError, integrate
from .liouville import build_superoperator, spectrum
from .master import Theory, parse_theory
from .output import svg_line_chart, write_csv
from .sweep import field_sweep, local_minima

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_EXPECT = 4

_CONFIG_FLAGS = [
    ("--theory", str, "haberkorn or kominis"),
    ("--n-nuclei", int, "number of spin-1/2 nuclei"),
    ("--couplings", str, "hyperfine list 'nucleus:target:A', comma separated"),
    ("--b", str, "Zeeman field in units of A"),
    ("--k-s", str, "singlet recombination rate"),
    ("--k-t", str, "triplet recombination rate"),
    ("--gamma", str, "spin relaxation rate"),
    ("--rho0", str, "initial state: SINGLET_UP, MIXED_TRIPLET or CUSTOM"),
    ("--rho0-file", str, ".npy file for rho0=CUSTOM"),
    ("--t-max", str, "integration horizon (1/A)"),
    ("--dt", str, "RK4 step (1/A)"),
    ("--stride", int, "snapshot decimation"),
    ("--measure", str, "singlet-triplet coherence measure"),
    ("--b-min", str, "sweep grid start"),
    ("--b-max", str, "sweep grid end"),
    ("--b-points", int, "sweep grid size"),
    ("--quad-stride", int, "sweep quadrature interval in dt units"),
    ("--gammas", str, "comma list of gamma values for gamma-scan"),
]


def _add_common(sub):
    sub.add_argument("--preset", choices=sorted(PRESETS),
                     help="parameter preset")
    sub.add_argument("--config", help="flat key=value config file")
    for flag, typ, help_text in _CONFIG_FLAGS:
        sub.add_argument(flag, type=typ, default=None, help=help_text)
    sub.add_argument("--out", default=None, help="output CSV path")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rpsim",
        description="Radical-pair spin dynamics: master equations, entropy "
                    "bounds, and magnetic-field effects.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="integrate one trajectory to CSV")
    _add_common(p)

    p = subs.add_parser("bounds", help="audit Ozawa / Lanford-Robinson bounds")
    _add_common(p)
    p.add_argument("--expect", default=None, metavar="ozawa=violated|ok",
                   help="exit 4 unless the Ozawa verdict matches")

    p = subs.add_parser("gamma-scan",
                        help="bound verdicts across a relaxation ladder")
    _add_common(p)

    p = subs.add_parser("sweep", help="magnetic-field sweep of Y_S, I_G, C35")
    _add_common(p)
    p.add_argument("--svg-prefix", default=None,
                   help="write <prefix>_<observable>.svg line charts")

    p = subs.add_parser("spectrum",
                        help="eigenvalues of the non-reacting generator")
    _add_common(p)
    return parser


def _config_from_args(args) -> RunConfig:
    overrides = {}
    for flag, _, _ in _CONFIG_FLAGS:
        key = flag.lstrip("-").replace("-", "_")
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return build_config(args.preset, args.config, overrides)


def _meta(cfg: RunConfig, extra=None) -> dict:
    meta = {k: v for k, v in cfg.to_dict().items() if v is not None}
    meta.update(extra or {})
    return meta


def _require_reaction(cfg):
    if cfg.k_s + cfg.k_t <= 0:
        raise ValueError("reaction runs need k_s + k_t > 0")


def cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    _require_reaction(cfg)
    record = integrate(cfg.system(), cfg.params(), cfg.initial_state(),
                       theory=cfg.theory, t_max=cfg.t_max, dt=cfg.dt,
                       stride=cfg.stride)
    rep = audit_bounds(record)
    tr = rep.trace
    rows = zip(record.times, record.traces, record.q_s, record.p_coh,
               record.purity, tr.s_initial, tr.s_final, tr.h_shannon,
               record.r_s, record.r_t)
    out = args.out or "simulate.csv"
    write_csv(out,
              ["t", "trace", "q_s", "p_coh", "purity", "s_initial",
               "s_final", "h_shannon", "r_s", "r_t"],
              rows, _meta(cfg, {"status": record.status}))
    print(f"wrote {out} ({len(record)} rows, status={record.status})")
    return EXIT_OK


def cmd_bounds(args) -> int:
    cfg = _config_from_args(args)
    _require_reaction(cfg)
    record = integrate(cfg.system(), cfg.params(), cfg.initial_state(),
                       theory=cfg.theory, t_max=cfg.t_max, dt=cfg.dt,
                       stride=cfg.stride)
    rep = audit_bounds(record)
    tr = rep.trace
    rows = zip(tr.times, tr.s_initial, tr.s_final, tr.delta_s, tr.h_shannon,
               tr.q_s, tr.purity)
    out = args.out or "bounds.csv"
    write_csv(out,
              ["t", "s_initial", "s_final", "delta_s", "h_shannon", "q_s",
               "purity"],
              rows,
              _meta(cfg, {"ozawa": rep.ozawa_verdict, "lr": rep.lr_verdict,
                          "max_violation": f"{rep.max_violation:.12g}",
                          "saturation_gap": f"{rep.saturation_gap:.12g}"}))
    print(f"{rep.ozawa_verdict} {rep.lr_verdict} "
          f"max_violation={rep.max_violation:.6g} "
          f"lr_max_violation={rep.lr_max_violation:.6g} "
          f"saturation_gap={rep.saturation_gap:.6g}")
    print(f"wrote {out}")
    if args.expect:
        key, _, want = args.expect.partition("=")
        if key.strip() != "ozawa" or want.strip().lower() not in ("violated",
                                                                  "ok"):
            raise ValueError("--expect takes ozawa=violated or ozawa=ok")
        got = "ok" if rep.ozawa_ok else "violated"
        if got != want.strip().lower():
            print(f"expected ozawa={want.strip()}, got {got}",
                  file=sys.stderr)
            return EXIT_EXPECT
    return EXIT_OK


def cmd_gamma_scan(args) -> int:
    cfg = _config_from_args(args)
    _require_reaction(cfg)
    gammas = cfg.gamma_list()
    rows = gamma_scan(cfg.system(), cfg.params(), gammas,
                      rho0=cfg.initial_state(), t_max=cfg.t_max, dt=cfg.dt,
                      stride=cfg.stride)
    out = args.out or "gamma_scan.csv"
    csv_rows = [(r.gamma, r.theory.value,
                 "OZAWA_OK" if r.ozawa_ok else "OZAWA_VIOLATED",
                 "LR_OK" if r.lr_ok else "LR_VIOLATED", r.max_violation)
                for r in rows]
    write_csv(out, ["gamma", "theory", "ozawa", "lr", "max_violation"],
              csv_rows, _meta(cfg))
    for r in csv_rows:
        print(f"gamma={r[0]:.6g} theory={r[1]:<9} {r[2]} {r[3]} "
              f"max_violation={r[4]:.6g}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    _require_reaction(cfg)
    if parse_theory(cfg.theory) is not Theory.KOMINIS:
        raise ValueError("sweep computes Groenewold information; "
                         "set theory=kominis")
    result = field_sweep(cfg.system(), cfg.params(), cfg.b_grid(),
                         t_max=cfg.t_max, dt=cfg.dt, stride=cfg.stride,
                         quad_stride=cfg.quad_stride)
    window = (result.b_grid >= 0.8) & (result.b_grid <= 1.2)
    dips = [i for i in local_minima(result.b_grid, result.i_g)
            if window[i]]
    footer = [f"warning B={b:g}: {msg}" if b is not None else
              f"warning: {msg}" for b, msg in result.warnings]
    if dips:
        best = min(dips, key=lambda i: result.i_g[i])
        footer.append(f"groenewold_dip B={result.b_grid[best]:.12g} "
                      f"I_G={result.i_g[best]:.12g}")
    rows = zip(result.b_grid, result.y_s, result.y_t, result.i_g, result.c35,
               result.slow_lambda)
    out = args.out or "sweep.csv"
    write_csv(out, ["b", "y_s", "y_t", "i_g", "c35", "slow_lambda"], rows,
              _meta(cfg, {"method": result.method}), footer)
    if dips:
        print(f"groenewold dip near B=A: B={result.b_grid[best]:.6g} "
              f"I_G={result.i_g[best]:.6g}")
    print(f"wrote {out} ({len(result)} field values, method={result.method})")
    if args.svg_prefix and len(result) > 1:
        for name, series, label in (("y_s", result.y_s, "singlet yield Y_S"),
                                    ("i_g", result.i_g, "Groenewold I_G (nats)"),
                                    ("c35", result.c35, "coherence yield C35")):
            path = f"{args.svg_prefix}_{name}.svg"
            svg_line_chart(path, result.b_grid, series,
                           title=f"{label} vs B", xlabel="B (units of A)",
                           ylabel=label)
            print(f"wrote {path}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    cfg = _config_from_args(args)
    superop = build_superoperator(cfg.system(), cfg.k_s, cfg.k_t)
    spec = spectrum(superop)
    rows = zip(range(len(spec.decay_rates)), spec.decay_rates,
               spec.frequencies)
    out = args.out or "spectrum.csv"
    write_csv(out, ["mode", "lambda", "omega"], rows,
              _meta(cfg, {"cond_v": f"{spec.cond_v:.6g}"}))
    print(f"slowest nonzero decay rate: {spec.slowest_nonzero_rate():.12g}")
    print(f"wrote {out}")
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "bounds": cmd_bounds,
    "gamma-scan": cmd_gamma_scan,
    "sweep": cmd_sweep,
    "spectrum": cmd_spectrum,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except IntegrationError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
