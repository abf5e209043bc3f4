"""Command-line harness: ``group-sampler <subcommand> ...``.

Tables go out as CSV and structured reports as JSON; complex numbers are
``[re, im]`` pairs. Failures print ``{"error": {"code", "message"}}`` and
exit nonzero.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
import io
import json
import math
import os
from pathlib import Path
import sys
import time

import numpy as np

from . import boas, coefficients, diagnostics, irregular, regular, schrodinger
from .errors import ParseError, PreconditionError, SamplerError, UsageError
from .models import (
    DualFunctional,
    SpectralState,
    bernstein_membership,
    coefficient_battery,
    evolve,
    evolve_complex,
    load_state,
    pair,
    random_spectral_state,
    Trajectory,
    sample_trajectory,
    state_from_dict,
)

THREADS_ENV = "GROUP_SAMPLER_THREADS"


class Table:
    def __init__(self, columns, rows):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _num(v):
    """Plain JSON value; complex becomes ``[re, im]``."""
    if isinstance(v, (complex, np.complexfloating)):
        return [_num(v.real), _num(v.imag)]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.ndarray):
        return [_num(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {k: _num(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_num(x) for x in v]
    return v


def _csv_cell(v):
    v = _num(v)
    return json.dumps(v) if isinstance(v, list) else v


def render(payload, fmt):
    if isinstance(payload, Table):
        if fmt == "json":
            return json.dumps({"columns": payload.columns, "rows": _num(payload.rows)}, indent=2) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(payload.columns)
        for row in payload.rows:
            w.writerow([_csv_cell(v) for v in row])
        return buf.getvalue()
    if fmt == "csv":
        return render(Table(["key", "value"], sorted(payload.items())), "csv")
    return json.dumps(_num(payload), indent=2, sort_keys=True) + "\n"


def _state(args):
    if getattr(args, "state", None):
        return load_state(args.state)
    rng = np.random.default_rng(args.seed)
    return random_spectral_state(rng, 8, getattr(args, "band", math.pi))


def _positive_int(text):
    try:
        v = int(text)
    except ValueError as exc:
        raise UsageError(f"expected an integer, got {text!r}") from exc
    if v < 1:
        raise UsageError(f"expected a positive integer, got {v}")
    return v


def _int_list(text):
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise UsageError("range must be nonempty")
    return [_positive_int(s) for s in items]


def _float_list(text):
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise UsageError("range must be nonempty")
    try:
        return [float(s) for s in items]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _complex(text):
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise UsageError(f"bad complex number {text!r}") from exc


def _nodes(args):
    if args.nodes_file:
        try:
            entries = json.loads(Path(args.nodes_file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read node file: {exc}") from exc
        return irregular.nodes_from_list(entries)
    return irregular.make_nodes(args.N, args.nodes)


def cmd_coeffs(args):
    if args.family == "favard":
        table = coefficients.favard_table(args.jmax)
        rows = [[j, table.values[j], table.bounds[j]] for j in range(args.jmax + 1)]
        return Table(["j", "K_j", "bound"], rows)
    table = coefficients.coefficient_table(args.family, args.m, args.K)
    order = np.argsort(table.ks, kind="stable")
    return Table(["family", "m", "k", "value"],
                 [[args.family, args.m, table.ks[i], table.values[i]] for i in order])


def cmd_boas(args):
    f = _state(args)
    sigma = args.sigma if args.sigma else f.spectral_radius()
    cfg = boas.BoasConfig(sigma, args.order, args.K)
    err, tail, in_space = boas.boas_error(f, cfg)
    return {"order": args.order, "sigma": sigma, "K": args.K, "error": err,
            "tail_bound": tail, "in_space": in_space, "holds": (err <= tail) if in_space else None}


def _t_range(text):
    parts = text.split(":")
    try:
        t0, t1, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except (IndexError, ValueError) as exc:
        raise UsageError(f"sweep must be t0:t1:steps, got {text!r}") from exc
    if len(parts) != 3 or steps < 1:
        raise UsageError("sweep must be t0:t1:steps with steps >= 1")
    return np.linspace(t0, t1, steps)


def _load_samples(path):
    """``{"spectrum", "t", "times", "samples", "derivative"}``: states as
    coefficient lists of ``[re, im]`` pairs."""
    try:
        data = json.loads(Path(path).read_text())
        spectrum = data["spectrum"]
        tau = float(data["t"])
        times = np.asarray(data["times"], dtype=float)
        rows = [state_from_dict({"spectrum": spectrum, "coeffs": c}).coeffs for c in data["samples"]]
        deriv = state_from_dict({"spectrum": spectrum, "coeffs": data["derivative"]})
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"cannot read samples file {path}: {exc}") from exc
    if len(rows) != times.size:
        raise ParseError("one sample per time is required")
    return Trajectory(times, np.array(rows).reshape(times.size, -1), deriv), deriv, tau


def cmd_recon(args):
    if args.samples:
        if args.formula != "l0":
            raise UsageError("--samples applies to the l0 recovery only")
        traj, deriv, tau = _load_samples(args.samples)
        rec = regular.recover_state(traj, deriv, tau, args.sigma, args.K)
        out = {"formula": "l0", "K": args.K, "t": tau, "recovered_coeffs": rec.coeffs}
        if args.state:
            f = load_state(args.state)
            out["error"] = (rec - f).norm()
        return out
    f = _state(args)
    if args.sweep:
        if args.formula == "vt":
            raise UsageError("--sweep runs along the real line; use --z for vt")
        rows = []
        for t in _t_range(args.sweep):
            rep = regular.reconstruct(args.formula, f, args.sigma, args.K, t=t, n=args.n)
            rows.append([t, rep.errors[0], rep.tails[0]])
        return Table(["t", "error", "tail"], rows)
    rep = regular.reconstruct(args.formula, f, args.sigma, args.K, t=args.t, z=args.z, n=args.n)
    out = rep.to_dict()
    out["error"] = out["max_error"]
    return out


def _functionals(f):
    if isinstance(f, SpectralState):
        return coefficient_battery(f)
    return [DualFunctional("point", x0=0.0)]


def cmd_irregular(args):
    f = _state(args)
    nodes = _nodes(args)
    cp = irregular.CanonicalProduct(nodes)
    start = time.perf_counter()
    out = {"formula": args.formula, "N": nodes.N, "rule": nodes.rule, "deviation": nodes.deviation,
           "in_space": bernstein_membership(f, math.pi)}
    if args.formula == "s4":
        z = args.z if args.z is not None else complex(args.t)
        approx = irregular.irregular_series(sample_trajectory(f, nodes.nodes), cp, z)
        out.update(z=z, error=(approx - evolve_complex(f, z)).norm())
    elif args.formula == "l2":
        nodes.require_anchor()
        approx = irregular.recover_vector(sample_trajectory(f, nodes.nodes), cp)
        out.update(error=(approx - f).norm())
    else:
        nodes.require_anchor()
        t = args.t
        errs = []
        for g in _functionals(f):
            if args.formula == "s3":
                F = sample_trajectory(f, nodes.nodes).pair(g)
                val = irregular.irregular_recon_scalar(F, cp, t, "s3", anchor=pair(f, g))
                target = pair(evolve(f, t), g)
            else:
                F = sample_trajectory(f, nodes.nodes + t).pair(g)
                val = irregular.irregular_recon_scalar(F, cp, t, "l3000", anchor=pair(evolve(f, t), g))
                target = pair(f, g)
            errs.append(abs(val - target))
        out.update(t=t, error=max(errs), per_functional_error=errs,
                   hypothesis="F_1 in B^2_pi is assumed; sigma_f <= pi is checked")
    out["wall_time"] = time.perf_counter() - start
    return out


def cmd_diag(args):
    f = _state(args)
    if args.check == "type":
        rep = diagnostics.spectral_type(f, args.kmax)
        rows = [[k, s] for k, s in zip(rep.ks, rep.sequence)]
        rows.append(["d_f", rep.d_f])
        rows.append(["sigma_f", rep.sigma_f])
        return Table(["k", "value"], rows)
    if args.check == "ks":
        rows = []
        for n in range(args.n + 1):
            for k in range(n + 1):
                lhs, rhs, holds = diagnostics.kolmogorov_check(f, k, n)
                rows.append([k, n, lhs, rhs, holds])
        return Table(["k", "n", "lhs", "rhs", "holds"], rows)
    if args.check == "modulus":
        return Table(["s", "omega"], [[s, diagnostics.modulus_of_continuity(f, args.m, s)]
                                      for s in args.s_list])
    rows, worst = diagnostics.jackson_ratio(f, args.k, args.m, args.sigmas)
    table = [[r.sigma, r.best_error, r.bound_term, r.ratio] for r in rows]
    table.append(["max", None, None, worst])
    return Table(["sigma", "best_error", "bound_term", "ratio"], table)


def cmd_schrodinger(args):
    f = load_state(args.spectrum) if args.spectrum else _state(args)
    if not isinstance(f, SpectralState):
        raise PreconditionError("the Schrodinger model needs a spectral state")
    rep = schrodinger.round_trip(f, args.N, rule=args.nodes, via=args.via, tau=args.tau)
    return rep


def _sweep_point(args, f, param):
    if args.formula == "boas":
        sigma = args.sigma
        err, tail, _ = boas.boas_error(f, boas.BoasConfig(sigma, args.order, param))
        return err, tail
    if args.formula in ("s1", "l0", "vt", "s2", "q"):
        rep = regular.reconstruct(args.formula, f, args.sigma, param, t=args.t, z=args.z, n=args.n)
        return rep.errors[0], rep.tails[0]
    nodes = irregular.make_nodes(param, args.nodes)
    cp = irregular.CanonicalProduct(nodes)
    if args.formula == "s4":
        zs = np.linspace(-3, 3, 301)
        samples = sample_trajectory(f, nodes.nodes)
        err = max((irregular.irregular_series(samples, cp, z) - evolve(f, z)).norm() for z in zs)
        return err, None
    nodes.require_anchor()
    approx = irregular.recover_vector(sample_trajectory(f, nodes.nodes), cp)
    return (approx - f).norm(), None


def cmd_sweep(args):
    params = args.K_list if args.formula in ("boas", "s1", "l0", "vt", "s2", "q") else args.N_list
    if not params:
        raise UsageError("sweep range must be nonempty")
    params = sorted(params)
    f = _state(args)
    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        results = list(pool.map(lambda p: _sweep_point(args, f, p), params))
    rows = []
    prev = None
    for p, (err, tail) in zip(params, results):
        ratio = None if prev is None or prev == 0 else err / prev
        rows.append([p, err, tail, ratio])
        prev = err
    return Table(["param", "error", "tail", "ratio"], rows)


def build_parser():
    p = _Parser(prog="group-sampler", description="Sampling formulas for one-parameter groups.")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=_positive_int)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("coeffs")
    c.add_argument("--family", choices=["A", "B", "favard"], required=True)
    c.add_argument("--m", type=_positive_int, default=1)
    c.add_argument("--K", type=_positive_int, default=10)
    c.add_argument("--jmax", type=int, default=6)
    c.set_defaults(func=cmd_coeffs, table=True)

    def state_args(sp):
        sp.add_argument("--state", help="JSON state file; a seeded random state otherwise")

    b = sub.add_parser("boas")
    state_args(b)
    b.add_argument("--order", type=_positive_int, default=1)
    b.add_argument("--sigma", type=float)
    b.add_argument("--K", "--terms", dest="K", type=_positive_int, default=10_000)
    b.set_defaults(func=cmd_boas, table=False)

    r = sub.add_parser("recon")
    state_args(r)
    r.add_argument("--formula", choices=["s1", "l0", "vt", "s2", "q"], required=True)
    r.add_argument("--sigma", type=float, default=math.pi)
    r.add_argument("--K", "--terms", dest="K", type=_positive_int, default=10_000)
    r.add_argument("--t", type=float, default=0.0)
    r.add_argument("--z", type=_complex)
    r.add_argument("--n", type=_positive_int, default=1)
    r.add_argument("--sweep", help="t0:t1:steps; emits a CSV table of (t, error, tail)")
    r.add_argument("--samples", help="JSON samples file for the l0 recovery")
    r.set_defaults(func=cmd_recon, table=False)

    i = sub.add_parser("irregular")
    state_args(i)
    i.add_argument("--formula", choices=["s3", "l3000", "s4", "l2"], required=True)
    i.add_argument("--nodes", default="zero")
    i.add_argument("--nodes-file")
    i.add_argument("--N", type=_positive_int, default=1000)
    i.add_argument("--z", type=_complex)
    i.add_argument("--t", type=float, default=0.0)
    i.set_defaults(func=cmd_irregular, table=False)

    d = sub.add_parser("diag")
    state_args(d)
    d.add_argument("--check", choices=["type", "ks", "modulus", "jackson"], required=True)
    d.add_argument("--kmax", type=int, default=500)
    d.add_argument("--k", type=int, default=0)
    d.add_argument("--n", type=int, default=6)
    d.add_argument("--m", type=int, default=2)
    d.add_argument("--s-list", type=_float_list, default=[0.0, 0.25, 0.5, 1.0])
    d.add_argument("--sigmas", type=_float_list, default=[1.0, 2.0, 4.0, 8.0])
    d.add_argument("--band", type=float, default=math.pi)
    d.set_defaults(func=cmd_diag, table=True)

    s = sub.add_parser("schrodinger")
    s.add_argument("--spectrum", help="JSON spectral state file (initial condition)")
    s.add_argument("--nodes", default="const:0.1")
    s.add_argument("--N", type=_positive_int, default=1000)
    s.add_argument("--via", choices=list(schrodinger.VIAS), default="l2")
    s.add_argument("--tau", type=float, default=0.37)
    s.add_argument("--band", type=float, default=0.75 * math.pi)
    s.set_defaults(func=cmd_schrodinger, table=False)

    w = sub.add_parser("sweep")
    state_args(w)
    w.add_argument("--formula", choices=["boas", "s1", "l0", "vt", "s2", "q", "s4", "l2"], required=True)
    w.add_argument("--K-list", type=_int_list, default=None)
    w.add_argument("--N-list", type=_int_list, default=None)
    w.add_argument("--sigma", type=float, default=math.pi)
    w.add_argument("--order", type=_positive_int, default=1)
    w.add_argument("--t", type=float, default=0.4)
    w.add_argument("--z", type=_complex)
    w.add_argument("--n", type=_positive_int, default=1)
    w.add_argument("--nodes", default="sin:0.2")
    w.add_argument("--band", type=float, default=math.pi)
    w.set_defaults(func=cmd_sweep, table=True)
    return p


def _resolve_threads(args):
    if args.threads is None:
        env = os.environ.get(THREADS_ENV)
        args.threads = _positive_int(env) if env else 1


def run(argv=None, stdout=None):
    """Parse, dispatch and emit; returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    try:
        args = build_parser().parse_args(argv)
        _resolve_threads(args)
        if args.command == "sweep" and not (args.K_list or args.N_list):
            raise UsageError("sweep needs --K-list or --N-list")
        payload = args.func(args)
        fmt = args.format or ("csv" if args.table or isinstance(payload, Table) else "json")
        text = render(payload, fmt)
        if args.out:
            Path(args.out).write_text(text)
        else:
            stdout.write(text)
        return 0
    except SamplerError as exc:
        stdout.write(json.dumps(exc.to_json()) + "\n")
        return 2 if isinstance(exc, UsageError) else 1
    except ValueError as exc:
        stdout.write(json.dumps(PreconditionError(str(exc)).to_json()) + "\n")
        return 1


def main(argv=None):
    sys.exit(run(argv))
