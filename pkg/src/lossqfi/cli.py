"""Command-line interface: figure-style data sweeps, single-point QFI
reports, probe optimization, region maps, SLD dumps and Monte Carlo runs.

All output is CSV or JSON data with fixed 12-significant-digit formatting;
identical inputs and seed produce byte-identical files. Exit codes: 0 on
success, 1 on engine or domain errors, 2 on usage or config errors.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .channel import LossParameter, drho_dphi, evolve
from .degauss import coverage_check, default_region_grids, region_map
from .errors import CutoffOverflowError, DegenerateStateError, DomainError
from .estimation import qfi, sld
from .fock import CutoffPolicy
from .montecarlo import simulate_fock_estimation
from .optimize import (best_cat, optimize_gaussian, optimize_qutrit,
                       optimize_superposition)
from .probes import _fnum, build_probe, parse_probe, probe_label

USAGE_ERROR = 2
ENGINE_ERROR = 1


class ConfigError(Exception):
    """Bad command configuration (exit 2)."""


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    x = float(value)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")


def _csv_cell(value) -> str:
    cell = _fmt(value)
    return f'"{cell}"' if "," in cell else cell


def _write_table(headers, rows, out, fmt):
    if fmt == "csv":
        lines = [",".join(headers)]
        lines += [",".join(_csv_cell(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        chunks = []
        for row in rows:
            fields = []
            for key, value in zip(headers, row):
                if isinstance(value, str):
                    fields.append(f'"{key}": "{value}"')
                elif isinstance(value, (bool, np.bool_)):
                    fields.append(f'"{key}": {_fmt(value)}')
                elif isinstance(value, float) and math.isinf(value):
                    fields.append(f'"{key}": "{_fmt(value)}"')
                else:
                    fields.append(f'"{key}": {_fmt(value)}')
            chunks.append("  {" + ", ".join(fields) + "}")
        text = "[\n" + ",\n".join(chunks) + "\n]\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _parse_range(text: str) -> np.ndarray:
    """Inclusive range start:stop:count."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"expected start:stop:count, got {text!r}")
    try:
        start, stop = _fnum(parts[0]), _fnum(parts[1])
        count = int(parts[2])
    except (DomainError, ValueError) as exc:
        raise ConfigError(f"bad range {text!r}: {exc}") from exc
    if count < 2:
        raise ConfigError("range needs at least 2 points")
    return np.linspace(start, stop, count)


def _policy(args) -> CutoffPolicy:
    return CutoffPolicy(tail_tol=args.tail_tol, cap=args.cutoff_cap)


def _loss(value: float, args) -> LossParameter:
    return LossParameter(value, phi_min=args.phi_min)


def _default_phi_grid(args, count: int = 25) -> np.ndarray:
    return np.linspace(args.phi_min, math.pi / 2 - args.phi_min, count)


def _split_families(text: str) -> list[str]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    # parameterized specs contain '=' after a ':'; re-join fragments that
    # belong to the same spec (commas inside key=value lists)
    merged: list[str] = []
    for item in items:
        if merged and "=" in item and ":" not in item:
            merged[-1] += "," + item
        else:
            merged.append(item)
    if not merged:
        raise ConfigError("family list is empty")
    return merged


def _family_params(family: str, body: str) -> dict:
    try:
        return dict(item.split("=", 1) for item in body.split(",")) if body else {}
    except ValueError as exc:
        raise ConfigError(f"bad family parameters in {family!r}") from exc


def _sweep_phi_rows(family: str, phis, args):
    policy = _policy(args)
    head, _, body = family.partition(":")
    optimizers = {
        "qutrit_opt": lambda nbar, loss, kv: optimize_qutrit(
            nbar, loss, policy=policy),
        "gaussian_opt": lambda nbar, loss, kv: optimize_gaussian(
            nbar, loss, policy=policy),
        "superposition_k": lambda nbar, loss, kv: optimize_superposition(
            int(kv.get("k", "3")), nbar, loss, seed=args.seed, policy=policy),
        "cat_best": lambda nbar, loss, kv: best_cat(nbar, loss, policy=policy),
    }
    rows = []
    if head in optimizers:
        kv = _family_params(family, body)
        if "nbar" not in kv:
            raise ConfigError(f"family {family!r} needs an nbar parameter")
        nbar = _fnum(kv["nbar"])
        for p in phis:
            res = optimizers[head](nbar, _loss(p, args), kv)
            rows.append([family, p, res.nbar, res.best_qfi, 4.0 * res.nbar])
    else:
        spec = parse_probe(family)
        for p in phis:
            rep = qfi(spec, _loss(p, args), policy=policy)
            rows.append([family, p, rep.nbar, rep.qfi, rep.ultimate_bound])
    return rows


def cmd_sweep_phi(args) -> int:
    families = _split_families(args.families)
    phis = _parse_range(args.phi) if args.phi else _default_phi_grid(args)
    rows = []
    for family in families:
        rows.extend(_sweep_phi_rows(family, phis, args))
    _write_table(["family", "phi", "nbar", "H", "ultimate_bound"], rows,
                 args.out, args.format)
    return 0


def _sweep_energy_value(tag: str, nbar: float, loss, args):
    policy = _policy(args)
    head, _, body = tag.partition(":")
    if head == "qubit":
        from .probes import Qubit
        rep = qfi(Qubit.from_nbar(nbar), loss, policy=policy)
        return rep.qfi
    if head == "coherent":
        from .probes import Coherent
        rep = qfi(Coherent(math.sqrt(nbar)), loss, policy=policy)
        return rep.qfi
    if head == "fock":
        n = int(round(nbar))
        if abs(nbar - n) > 1e-9 or n < 1:
            raise DomainError(f"fock family needs integer energies, got {nbar}")
        from .probes import Fock
        return qfi(Fock(n), loss, policy=policy).qfi
    if head == "qutrit_opt":
        return optimize_qutrit(nbar, loss, policy=policy).best_qfi
    if head == "gaussian_opt":
        return optimize_gaussian(nbar, loss, policy=policy).best_qfi
    if head == "superposition_k":
        kv = _family_params(tag, body)
        kmax = int(kv.get("k", "3"))
        return optimize_superposition(kmax, nbar, loss, seed=args.seed,
                                      policy=policy).best_qfi
    if head == "cat_best":
        return best_cat(nbar, loss, policy=policy).best_qfi
    raise ConfigError(f"unknown energy-sweep family {tag!r}")


def cmd_sweep_energy(args) -> int:
    families = _split_families(args.families)
    nbars = _parse_range(args.nbar)
    loss = _loss(_fnum(args.phi), args)
    rows = []
    for family in families:
        for nbar in nbars:
            h = _sweep_energy_value(family, float(nbar), loss, args)
            rows.append([family, float(nbar), loss.phi, h, 4.0 * float(nbar)])
    _write_table(["family", "nbar", "phi", "H", "ultimate_bound"], rows,
                 args.out, args.format)
    return 0


def cmd_qfi(args) -> int:
    spec = parse_probe(args.probe)
    rep = qfi(spec, _loss(_fnum(args.phi), args), runs=args.runs,
              policy=_policy(args))
    headers = ["probe", "phi", "nbar", "qfi", "ultimate_bound",
               "crlb_variance", "ultimate_variance", "runs", "method"]
    ult_var = 1.0 / (4.0 * rep.nbar * rep.runs) if rep.nbar > 0 else math.inf
    rows = [[probe_label(spec), rep.phi.phi, rep.nbar, rep.qfi,
             rep.ultimate_bound, rep.crlb_variance, ult_var, rep.runs,
             rep.method]]
    _write_table(headers, rows, args.out, args.format)
    return 0


def cmd_optimize(args) -> int:
    loss = _loss(_fnum(args.phi), args)
    policy = _policy(args)
    if args.family == "qutrit":
        res = optimize_qutrit(args.nbar, loss, policy=policy)
        extras = [("beta", res.best_params["beta"])]
    elif args.family == "gaussian":
        res = optimize_gaussian(args.nbar, loss, policy=policy)
        extras = [("squeeze_fraction", res.best_params["squeeze_fraction"]),
                  ("theta_rel", res.best_params["theta_rel"]),
                  ("eta", res.best_params["eta"]), ("r", res.best_params["r"])]
    elif args.family == "superposition":
        res = optimize_superposition(args.kmax, args.nbar, loss,
                                     seed=args.seed, policy=policy)
        extras = [(f"c{m}", f"{c.real:.12g}{c.imag:+.12g}j")
                  for m, c in enumerate(res.best_params["coefficients"])]
    elif args.family == "cat":
        res = best_cat(args.nbar, loss, policy=policy)
        extras = [("alpha", res.best_params["alpha"]),
                  ("sign", res.best_params["sign"])]
    else:
        raise ConfigError(f"unknown optimization family {args.family!r}")
    headers = (["family", "nbar", "phi", "best_qfi", "ultimate_bound",
                "starts", "converged", "seed"] + [k for k, _ in extras])
    rows = [[res.family, res.nbar, loss.phi, res.best_qfi, 4.0 * res.nbar,
             res.starts, res.converged, res.seed] + [v for _, v in extras]]
    _write_table(headers, rows, args.out, args.format)
    return 0


def cmd_region(args) -> int:
    policy = _policy(args)
    etas = _parse_range(args.eta) if args.eta else None
    rs = _parse_range(args.r) if args.r else None
    if (etas is None) != (rs is None):
        defaults = default_region_grids()
        etas = defaults[0] if etas is None else etas
        rs = defaults[1] if rs is None else rs
    phis = ([_fnum(t) for t in args.phi.split(",")] if args.phi else
            [math.pi / 16, math.pi / 8, math.pi / 4, 3 * math.pi / 8,
             math.pi / 2 - args.phi_min])
    nbars = _parse_range(args.nbar) if args.nbar else np.linspace(0.05, 0.95, 19)
    region = region_map(etas, rs, policy=policy)
    ext = args.format
    prefix = args.out or "region"
    _write_table(["eta", "r", "nbar", "beta"],
                 [[p["eta"], p["r"], p["nbar"], p["beta"]] for p in region.points],
                 f"{prefix}_region.{ext}", args.format)
    report = coverage_check([_loss(p, args) for p in phis], nbars, region,
                            policy=policy)
    for p in phis:
        loss = _loss(p, args)
        rows = [[c.phi, c.nbar, c.beta_opt, c.qfi_opt]
                for c in report.points if c.phi == loss.phi]
        _write_table(["phi", "nbar", "beta_opt", "H_opt"], rows,
                     f"{prefix}_curve_phi{loss.phi:.6g}.{ext}", args.format)
    _write_table(["phi", "nbar", "beta_opt", "qfi_opt", "covered", "exception"],
                 [[c.phi, c.nbar, c.beta_opt, c.qfi_opt, c.covered, c.exception]
                  for c in report.points],
                 f"{prefix}_coverage.{ext}", args.format)
    if not report.passed:
        misses = report.failures
        sys.stderr.write(f"coverage failed at {len(misses)} non-exception points\n")
        return ENGINE_ERROR
    return 0


def cmd_sld_dump(args) -> int:
    spec = parse_probe(args.probe)
    loss = _loss(_fnum(args.phi), args)
    state = build_probe(spec, _policy(args))
    rho = evolve(state, loss)
    operator = sld(rho, drho_dphi(rho, loss), loss)
    dim = operator.matrix.shape[0]
    headers = ["eigenvalue"] + [f"re_{m}" for m in range(dim)] + \
              [f"im_{m}" for m in range(dim)]
    rows = []
    for k in range(dim):
        vec = operator.spectrum.eigenvectors[:, k]
        rows.append([operator.spectrum.eigenvalues[k]]
                    + [v.real for v in vec] + [v.imag for v in vec])
    _write_table(headers, rows, args.out, args.format)
    return 0


def cmd_simulate(args) -> int:
    rep = simulate_fock_estimation(args.n, _loss(_fnum(args.phi), args),
                                   args.runs, args.reps, seed=args.seed)
    headers = ["n", "phi_true", "runs", "repetitions", "seed", "phi_hat_mean",
               "empirical_variance", "crlb", "normalized_variance",
               "boundary_clips"]
    rows = [[rep.n, rep.phi_true, rep.runs, rep.repetitions, rep.seed,
             rep.phi_hat_mean, rep.empirical_variance, rep.crlb,
             rep.normalized_variance, rep.boundary_clips]]
    _write_table(headers, rows, args.out, args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lossqfi",
        description="QFI toolkit for loss estimation in bosonic channels")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--cutoff-cap", type=int, default=200)
    shared.add_argument("--tail-tol", type=float, default=1e-10)
    shared.add_argument("--phi-min", type=float, default=1e-3)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--out", default=None)
    shared.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kwargs):
        return sub.add_parser(name, parents=[shared], **kwargs)

    p = add_parser("qfi", help="QFI of a single probe at one loss value")
    p.add_argument("probe")
    p.add_argument("--phi", required=True)
    p.add_argument("--runs", type=int, default=1)
    p.set_defaults(func=cmd_qfi)

    p = add_parser("sweep-phi", help="QFI versus loss for probe families")
    p.add_argument("--families", required=True)
    p.add_argument("--phi", default=None, help="start:stop:count")
    p.set_defaults(func=cmd_sweep_phi)

    p = add_parser("sweep-energy", help="QFI versus energy at fixed loss")
    p.add_argument("--families", required=True)
    p.add_argument("--nbar", required=True, help="start:stop:count")
    p.add_argument("--phi", required=True)
    p.set_defaults(func=cmd_sweep_energy)

    p = add_parser("optimize", help="optimize one family at fixed energy")
    p.add_argument("--family", required=True,
                   choices=("qutrit", "gaussian", "superposition", "cat"))
    p.add_argument("--nbar", type=float, required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--kmax", type=int, default=3)
    p.set_defaults(func=cmd_optimize)

    p = add_parser("region", help="attainable-region map and coverage")
    p.add_argument("--eta", default=None, help="start:stop:count")
    p.add_argument("--r", default=None, help="start:stop:count")
    p.add_argument("--phi", default=None, help="comma list")
    p.add_argument("--nbar", default=None, help="start:stop:count")
    p.set_defaults(func=cmd_region)

    p = add_parser("sld-dump", help="optimal measurement of a probe")
    p.add_argument("probe")
    p.add_argument("--phi", required=True)
    p.set_defaults(func=cmd_sld_dump)

    p = add_parser("simulate", help="Monte Carlo photon-counting runs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return USAGE_ERROR
    except (DomainError, DegenerateStateError, CutoffOverflowError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return ENGINE_ERROR


if __name__ == "__main__":
    sys.exit(main())
