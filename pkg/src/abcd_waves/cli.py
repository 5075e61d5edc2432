"""Command line entry point: ``abcd-waves <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 domain error (no bifurcation,
incompatible forcing, resonance failure, ...).
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import __version__
from .bifurcation import BifParams, StandingWave, higher_order, standing_wave, theta
from .config import RunConfig, WaveConfig, load_config
from .errors import DomainError
from .feasibility import ABCDParams, classify
from .linearized import LinearizedOperator, symmetry_T
from .resonance import ScaledParams, as_fraction, divisor_bound_bs, enumerate_sigma, uniqueness_certificate
from .spectral import FieldPair, evaluate_at, grid, read_coefficients, write_coefficients
from .verify import pde_residual

log = logging.getLogger(__name__)
TWO_PI = 2 * math.pi


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- deterministic output -------------------------------------------------------------
def _num(x: float) -> str:
    return format(x, ".17g")


def to_json(obj, indent: int = 2) -> str:
    """JSON with every float at 17 significant digits; non-finite floats become null."""

    def render(o, level: int) -> str:
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _num(float(o)) if math.isfinite(o) else "null"
        if isinstance(o, Fraction):
            return json.dumps(str(o))
        if isinstance(o, complex):
            return render([o.real, o.imag], level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {render(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(not isinstance(v, (dict, list, tuple)) for v in o):
                return "[" + ", ".join(render(v, level + 1) for v in o) + "]"
            return "[\n" + ",\n".join(pad + render(v, level + 1) for v in o) + "\n" + end + "]"
        return json.dumps(str(o))

    return render(obj, 0) + "\n"


# -- argument parsing -------------------------------------------------------------------
def _add(p, *names, **kw):
    p.add_argument(*names, default=argparse.SUPPRESS, **kw)


def _wave_flags(p):
    _add(p, "--alpha0")
    _add(p, "--beta0")
    _add(p, "--gamma0")
    _add(p, "--mu", type=float)
    _add(p, "--nu", type=float)
    _add(p, "--B", type=float)
    _add(p, "--tau", type=float)
    _add(p, "--order", type=int)
    _add(p, "--formula", choices=["direct", "swapped"])
    _add(p, "--beta2-source", dest="beta2_source", choices=["closed_form", "inner_product"])
    _add(p, "--refine", action=argparse.BooleanOptionalAction)
    _add(p, "--nx", type=int)
    _add(p, "--nt", type=int)
    _add(p, "--out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="abcd-waves", description="Standing waves of Boussinesq abcd systems.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="TOML file; command line flags take precedence")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("classify", help="feasibility verdict for (a, b, c, d)")
    for name in ("a", "b", "c", "d", "theta2", "alpha", "beta", "mu"):
        _add(p, f"--{name}")
    _add(p, "--lambda", dest="lambda")
    _add(p, "--P", type=int)
    _add(p, "--Q", type=int)
    _add(p, "--json", action="store_true")

    p = sub.add_parser("resonance", help="resonance set, uniqueness certificate and divisor bound")
    for name in ("alpha", "beta", "gamma"):
        _add(p, f"--{name}")
    _add(p, "--method", choices=["quartic", "brute"])
    _add(p, "--P", type=int)
    _add(p, "--Q", type=int)

    p = sub.add_parser("bifurcate", help="build a standing wave")
    _wave_flags(p)

    p = sub.add_parser("verify", help="PDE residual of a wave file or of the trivial family")
    _add(p, "--wave")
    _add(p, "--trivial", action="store_true")
    for name in ("alpha", "beta", "gamma"):
        _add(p, f"--{name}")
    _add(p, "--B", type=float)
    _add(p, "--nx", type=int)
    _add(p, "--nt", type=int)

    p = sub.add_parser("figure1", help="free-surface profile series at a fixed time")
    _wave_flags(p)
    _add(p, "--t", type=float)

    p = sub.add_parser("dump", help="coefficient CSV of a standing wave")
    _wave_flags(p)
    return parser


# -- helpers ------------------------------------------------------------------------------
def _emit(text: str, out: str | None, stdout) -> None:
    if out:
        Path(out).write_text(text)
    else:
        stdout.write(text)


def _wave(cfg: WaveConfig) -> tuple[StandingWave, LinearizedOperator]:
    base = ScaledParams(cfg.alpha0, cfg.beta0, cfg.gamma0)
    bp = BifParams(base, cfg.mu, cfg.nu, cfg.B, cfg.tau)
    op = LinearizedOperator.build(base)
    w = standing_wave(
        bp, cfg.order, op=op, formula=cfg.formula, beta2_source=cfg.beta2_source, refine=cfg.refine
    )
    return w, op


def _wave_header(cfg: WaveConfig, w: StandingWave) -> str:
    a, b, g = w.params.perturbed()
    lines = [
        f"# base alpha0={cfg.alpha0} beta0={cfg.beta0} gamma0={cfg.gamma0}",
        f"# mu={_num(cfg.mu)} nu={_num(cfg.nu)} B={_num(cfg.B)} tau={_num(cfg.tau)} order={w.order}",
        f"# p0={w.p0} q0={w.q0} amplitude={_num(w.amplitude)}",
        f"# alpha={_num(a)} beta={_num(b)} gamma={_num(g)}",
    ]
    return "\n".join(lines) + "\n"


def _grid_csv(U: FieldPair, nx: int, nt: int) -> str:
    x, t = grid(nx, nt)
    eta = evaluate_at(U.eta, x, t).real
    u = evaluate_at(U.u, x, t).real
    buf = io.StringIO()
    buf.write("x,t,eta,u\n")
    for i in range(nx):
        for j in range(nt):
            buf.write(f"{_num(x[i])},{_num(t[j])},{_num(eta[i, j])},{_num(u[i, j])}\n")
    return buf.getvalue()


def _header_params(path: str) -> dict[str, float]:
    params = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            for token in line[1:].split():
                if "=" in token:
                    k, v = token.split("=", 1)
                    params[k] = v
    return params


# -- subcommands ----------------------------------------------------------------------------
def cmd_classify(cfg: RunConfig, stdout) -> int:
    c = cfg.classify
    if c.theta2 is not None or c.lam is not None:
        if any(v is not None for v in (c.a, c.b, c.c, c.d)):
            raise UsageError("give either --a --b --c --d or --theta2 --lambda --mu, not both")
        if c.theta2 is None or c.lam is None or c.mu is None:
            raise UsageError("provenance form needs --theta2, --lambda and --mu")
        params = ABCDParams.from_provenance(c.theta2, c.lam, c.mu)
    else:
        if any(v is None for v in (c.a, c.b, c.c, c.d)):
            raise UsageError("classify needs --a --b --c --d")
        params = ABCDParams(c.a, c.b, c.c, c.d)
    verdict = classify(params, c.alpha, c.beta, P=c.P, Q=c.Q)
    if c.as_json:
        doc = {"params": {k: str(v) for k, v in zip("abcd", params.coeffs)}, **verdict.as_dict()}
        stdout.write(to_json(doc))
    else:
        kl = verdict.kernel_limit.label if verdict.kernel_limit else "n/a"
        stdout.write(
            f"class={verdict.wellposed_class.value} verdict={verdict.verdict.value} "
            f"kernel_limit={kl} divisor_bounded={verdict.divisor_bounded}\n"
        )
    return 0


def cmd_resonance(cfg: RunConfig, stdout) -> int:
    r = cfg.resonance
    sp = ScaledParams(r.alpha, r.beta, r.gamma)
    sigma = enumerate_sigma(sp, r.method)
    doc = {
        "alpha": str(sp.alpha),
        "beta": str(sp.beta),
        "gamma": str(sp.gamma),
        "sigma": [list(e) for e in sigma],
        "complete_up_to": sigma.complete_up_to,
        "complete": sigma.complete,
        "method": sigma.method,
        "certificates": [str(c) for c in sigma.certificates],
    }
    if len(sigma) == 1:
        doc["uniqueness"] = uniqueness_certificate(sp, sigma.elements[0]).as_dict()
        db = divisor_bound_bs(sp, r.P, r.Q)
        doc["divisor_bound"] = {
            "M": db.M,
            "scan_max": db.scan_max,
            "tail_bound": db.tail_bound,
            "asymptote_per_q": {str(k): v for k, v in db.asymptote_per_q.items()},
            "excluded_q": list(db.excluded_q),
            "bounded": db.bounded,
            "scanned": list(db.scanned),
        }
    stdout.write(to_json(doc))
    return 0


def cmd_bifurcate(cfg: RunConfig, stdout) -> int:
    c = cfg.bifurcate
    w, _ = _wave(c)
    report = pde_residual(w, nx=c.nx, nt=c.nt)
    doc = {
        "p0q0": [w.p0, w.q0],
        "amplitude": w.amplitude,
        "order": w.order,
        "coefficients": w.coefficients.as_dict(),
        "residual": report.as_dict(),
        "notes": list(w.notes),
    }
    if c.out:
        out = Path(c.out)
        buf = io.StringIO()
        buf.write(_wave_header(c, w))
        write_coefficients(w.U, buf)
        out.write_text(buf.getvalue())
        grid_path = out.with_name(out.stem + "_grid.csv")
        grid_path.write_text(_wave_header(c, w) + _grid_csv(w.U, c.nx, c.nt))
        doc["files"] = [str(out), str(grid_path)]
    stdout.write(to_json(doc))
    return 0


def cmd_verify(cfg: RunConfig, stdout) -> int:
    v = cfg.verify
    if v.trivial == (v.wave is not None):
        raise UsageError("verify needs exactly one of --trivial or --wave FILE")
    header = _header_params(v.wave) if v.wave else {}
    params = []
    for name, default in (("alpha", 5), ("beta", 4), ("gamma", "1/4")):
        value = getattr(v, name)
        if value is None:
            value = header.get(name, default)
        params.append(float(as_fraction(value)))
    if v.trivial:
        U = FieldPair.from_dicts({(0, 0): v.B}, {})
        eps = abs(v.B)
    else:
        with open(v.wave) as fh:
            U = read_coefficients(fh)
        eps = None
        if "amplitude" in header:
            eps = float(header["amplitude"]) + sum(abs(float(header.get(k, 0))) for k in ("mu", "nu", "B"))
    report = pde_residual(U, tuple(params), nx=v.nx, nt=v.nt, epsilon=eps)
    stdout.write(to_json({"params": params, **report.as_dict()}))
    return 0


def cmd_figure1(cfg: RunConfig, stdout) -> int:
    c = cfg.figure1
    if c.order != 2:
        raise UsageError("figure1 shows the leading and second-order parts; use --order 2")
    w, op = _wave(c)
    t_eval = math.fmod(c.t, TWO_PI)
    if t_eval < 0:
        t_eval += TWO_PI
    x = np.linspace(-math.pi, math.pi, c.nx)
    lead = symmetry_T(theta(op, w.amplitude, c.B), c.tau)
    second = symmetry_T(higher_order(w.params, 2, op, w.amplitude, check_equivariance=False).V[2], c.tau)
    eta_lead = evaluate_at(lead.eta, x, [t_eval])[:, 0].real
    eta_second = evaluate_at(second.eta, x, [t_eval])[:, 0].real
    buf = io.StringIO()
    buf.write(_wave_header(c, w))
    buf.write(f"# t={_num(c.t)} evaluated at t mod 2pi = {_num(t_eval)}\n")
    buf.write("# gnuplot: plot 'file' u 1:2 w l t 'leading', '' u 1:3 w l t 'second order', '' u 1:4 w l t 'total'\n")
    buf.write("x,eta_leading,eta_second_order,eta_total\n")
    for xi, a, b in zip(x, eta_lead, eta_second):
        buf.write(f"{_num(xi)},{_num(a)},{_num(b)},{_num(a + b)}\n")
    _emit(buf.getvalue(), c.out, stdout)
    return 0


def cmd_dump(cfg: RunConfig, stdout) -> int:
    c = cfg.dump
    w, _ = _wave(c)
    buf = io.StringIO()
    buf.write(_wave_header(c, w))
    write_coefficients(w.U, buf)
    _emit(buf.getvalue(), c.out, stdout)
    return 0


COMMANDS = {
    "classify": cmd_classify,
    "resonance": cmd_resonance,
    "bifurcate": cmd_bifurcate,
    "verify": cmd_verify,
    "figure1": cmd_figure1,
    "dump": cmd_dump,
}


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        ns = vars(build_parser().parse_args(argv))
        logging.basicConfig(level=logging.INFO if ns.pop("verbose") else logging.ERROR)
        command = ns.pop("command")
        cfg = load_config(ns.pop("config"), {command: ns})
        return COMMANDS[command](cfg, stdout)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return 1
    except DomainError as exc:
        stderr.write(f"domain error: {type(exc).__name__}: {exc}\n")
        return 2
    except ValidationError as exc:
        stderr.write(f"invalid configuration: {exc}\n")
        return 1
    except (ValueError, OSError, ZeroDivisionError) as exc:
        stderr.write(f"error: {exc}\n")
        return 1


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
