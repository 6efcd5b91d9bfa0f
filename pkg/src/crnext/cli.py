"""Command-line interface: ``crnext {analyze,simulate,lyapunov,extinction,plot}``.

Exit codes: 0 success, 1 internal error, 2 user or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import exact
from .dynamics import IntegrateOptions, Trajectory, integrate
from .errors import CrnError, NotApplicable, NotDeficiencyZero, NotFirstOrder, ParseError
from .extinction import (
    DEFAULT_EPS_STRONG,
    DEFAULT_EPS_WEAK,
    strong_extinction_species_linear,
    trajectory_extinction_report,
    weak_extinction_certificate,
)
from .graph import is_weakly_reversible, linkage_classes, strongly_connected_components
from .lyapunov import construct_w_deficiency_zero, lyapunov_from_separator
from .model import MassActionSystem, RateAssignment, ReactionNetwork
from .parser import parse_network
from .structure import (
    Consistent,
    deficiency,
    deficiency_zero_diagnostics,
    is_consistent,
    is_conservative,
    stoichiometric_matrix,
)
from .svg import simplex_svg, timeseries_svg

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2

CONSISTENT_MESSAGE = "consistent - no linear Lyapunov function exists for all rate constants"


class UsageError(Exception):
    """Bad user input that is not a parse error (exit code 2)."""


def _rat(v) -> int | str:
    v = Fraction(v)
    return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _vec(v) -> list:
    return [_rat(x) for x in v]


def _load(path: str) -> tuple[ReactionNetwork, RateAssignment | None]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise UsageError(f"{path} is not valid UTF-8") from None
    return parse_network(text)


def parse_rate_flag(text: str, n_edges: int, base: RateAssignment | None) -> RateAssignment:
    """Apply a ``--k`` value: a uniform number and/or ``e<i>=<value>`` overrides."""
    k = list(base.k) if base is not None else [None] * n_edges
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        try:
            if "=" in tok:
                name, val = tok.split("=", 1)
                name = name.strip()
                if not name.startswith("e") or not name[1:].isdigit():
                    raise UsageError(f"bad edge reference {name!r} in --k (expected e<index>)")
                j = int(name[1:])
                if j >= n_edges:
                    raise UsageError(f"--k refers to edge {j}, network has {n_edges} edges")
                k[j] = float(Fraction(val.strip()))
            else:
                k = [float(Fraction(tok))] * n_edges
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad rate value {tok!r} in --k") from None
    if any(v is None for v in k):
        missing = [f"e{j}" for j, v in enumerate(k) if v is None]
        raise UsageError(f"no rate constant for {', '.join(missing)}")
    try:
        return RateAssignment(tuple(k))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _system(net, rates, k_flag) -> MassActionSystem:
    if k_flag is not None:
        rates = parse_rate_flag(k_flag, net.n_edges, rates)
    if rates is None:
        raise UsageError("no rate constants: add '; k = ...' to every reaction or pass --k")
    return MassActionSystem(net, rates)


def _parse_state(text: str, n: int, what: str = "--x0") -> np.ndarray:
    try:
        x = np.array([float(Fraction(t.strip())) for t in text.split(",")])
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{what} must be a comma-separated list of numbers") from None
    if x.size != n:
        raise UsageError(f"{what} has {x.size} entries but the network has {n} species")
    if np.any(~(x > 0)) or not np.all(np.isfinite(x)):
        raise UsageError(f"{what} must be strictly positive")
    return x


# -- report assembly ------------------------------------------------------------


def _lyapunov_section(net: ReactionNetwork, verdict) -> dict:
    try:
        lf, tr = construct_w_deficiency_zero(net)
        return {
            "method": "deficiency_zero",
            "w": _vec(lf.w),
            "edge_signs": list(lf.edge_signs),
            "trace": {
                "linkage_class": list(tr.linkage_class),
                "terminal_scc": list(tr.terminal_scc),
                "component": list(tr.component),
                "complement": list(tr.complement),
                "crossing_edge": tr.crossing_edge,
                "crossing_edges": list(tr.crossing_edges),
                "dim_S": tr.dim_S,
                "dim_S1": tr.dim_S1,
                "dim_S2": tr.dim_S2,
            },
        }
    except (NotApplicable, NotDeficiencyZero):
        pass
    if isinstance(verdict, Consistent):
        return {"method": None, "message": CONSISTENT_MESSAGE}
    lf = lyapunov_from_separator(net, verdict.w)
    return {"method": "separator", "w": _vec(lf.w), "edge_signs": list(lf.edge_signs)}


def _strong_section(net: ReactionNetwork) -> dict:
    try:
        res = strong_extinction_species_linear(net)
    except (NotFirstOrder, NotApplicable) as exc:
        return {"applicable": False, "reason": f"{type(exc).__name__}: {exc}"}
    return {"applicable": True, "species": list(res.species), "layers": [list(layer) for layer in res.layers]}


def _certificate_section(net: ReactionNetwork) -> dict:
    cert = weak_extinction_certificate(net)
    h = cert.hypotheses
    return {
        "kind": cert.kind,
        "separator": _vec(cert.separator) if cert.separator is not None else None,
        "conservation": _vec(cert.conservation) if cert.conservation is not None else None,
        "hypotheses": {
            "deficiency": h.deficiency,
            "weakly_reversible": h.weakly_reversible,
            "conservative": h.conservative,
            "consistent": h.consistent,
        },
    }


def build_report(net: ReactionNetwork) -> dict:
    """Full structural analysis as a JSON-ready dict with a fixed key order."""
    scc = strongly_connected_components(net)
    link = linkage_classes(net)
    d = deficiency(net)
    diag = deficiency_zero_diagnostics(net)
    verdict = is_consistent(net)
    if isinstance(verdict, Consistent):
        consistency = {"verdict": "Consistent", "lambda": _vec(verdict.lam)}
    else:
        consistency = {
            "verdict": "Inconsistent",
            "separator": _vec(verdict.w),
            "edge_dots": _vec(verdict.edge_dots(net)),
        }
    c = is_conservative(net)
    report = {
        "network": {
            "species": list(net.species),
            "vertices": [net.complex_str(i) for i in range(net.n_vertices)],
            "edges": [
                {"source": e.source, "target": e.target, "reaction": net.reaction_str(j)}
                for j, e in enumerate(net.edges)
            ],
        },
        "graph": {
            "linkage_classes": [list(cl) for cl in link.classes],
            "sccs": [list(cl) for cl in scc.classes],
            "terminal": list(scc.terminal_flags),
            "weakly_reversible": is_weakly_reversible(net),
        },
        "deficiency": {
            "num_vertices": d.num_vertices,
            "num_linkage_classes": d.num_linkage_classes,
            "stoich_dim": d.stoich_dim,
            "deficiency": d.deficiency,
            "affinely_independent": list(diag.affinely_independent),
            "subspaces_independent": diag.subspaces_independent,
        },
        "consistency": consistency,
        "conservative": _vec(c) if c is not None else None,
        "lyapunov": _lyapunov_section(net, verdict),
        "extinction": {"weak_certificate": _certificate_section(net), "strong": _strong_section(net)},
    }
    verify_report(net, report)
    return report


def verify_report(net: ReactionNetwork, report: dict) -> None:
    """Re-check every certificate in ``report`` in exact arithmetic; raise on failure."""
    M = stoichiometric_matrix(net)

    def frac(v):
        return [Fraction(x) for x in v]

    cons = report["consistency"]
    if cons["verdict"] == "Consistent":
        ok = exact.PositiveDependence(tuple(frac(cons["lambda"]))).verify(M)
    else:
        ok = exact.Separator(tuple(frac(cons["separator"]))).verify(M)
    if not ok:
        raise AssertionError("consistency certificate failed re-verification")
    c = report["conservative"]
    if c is not None and not (all(Fraction(x) > 0 for x in c) and not any(M.vecmat(frac(c)))):
        raise AssertionError("conservation vector failed re-verification")
    lyap = report["lyapunov"]
    if lyap.get("w") is not None:
        dots = M.vecmat(frac(lyap["w"]))
        if any(d > 0 for d in dots) or not any(d < 0 for d in dots):
            raise AssertionError("Lyapunov vector failed re-verification")
    _check_weak_certificate(M, report["extinction"]["weak_certificate"])


def _check_weak_certificate(M, cert: dict) -> None:
    if cert["kind"] != "WeakGuaranteed":
        return
    if not exact.Separator(tuple(Fraction(x) for x in cert["separator"])).verify(M):
        raise AssertionError("extinction separator failed re-verification")
    cv = [Fraction(x) for x in cert["conservation"]]
    if not (all(x > 0 for x in cv) and not any(M.vecmat(cv))):
        raise AssertionError("extinction conservation vector failed re-verification")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _fmt_list(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def render_text(report: dict) -> str:
    net = report["network"]
    g = report["graph"]
    d = report["deficiency"]
    out = [f"species: {', '.join(net['species'])}", "reactions:"]
    out += [f"  e{j}: {e['reaction']}" for j, e in enumerate(net["edges"])]
    out.append(f"linkage classes: {len(g['linkage_classes'])}")
    out.append(
        "strongly connected components: "
        + ", ".join(
            "{" + ", ".join(net["vertices"][v] for v in cl) + "}" + ("*" if t else "")
            for cl, t in zip(g["sccs"], g["terminal"])
        )
        + "   (* = terminal)"
    )
    out.append(f"weakly reversible: {'yes' if g['weakly_reversible'] else 'no'}")
    out.append(
        f"deficiency: {d['deficiency']}  (|V|={d['num_vertices']}, linkage classes={d['num_linkage_classes']}, s={d['stoich_dim']})"
    )
    cons = report["consistency"]
    if cons["verdict"] == "Consistent":
        out.append(f"consistency: Consistent, lambda = {_fmt_list(cons['lambda'])}")
    else:
        out.append(f"consistency: Inconsistent, separator w = {_fmt_list(cons['separator'])}")
        out.append(f"  w . (y' - y) per edge: {_fmt_list(cons['edge_dots'])}")
    c = report["conservative"]
    out.append(f"conservative: {'c = ' + _fmt_list(c) if c is not None else 'no positive conservation law'}")
    out += _render_lyapunov(report["lyapunov"], net)
    cert = report["extinction"]["weak_certificate"]
    out.append(f"weak extinction certificate: {cert['kind']}")
    strong = report["extinction"]["strong"]
    if strong["applicable"]:
        out.append(f"strong extinction (first-order): {{{', '.join(strong['species'])}}}")
        for i, layer in enumerate(strong["layers"], start=1):
            out.append(f"  N{i} = {{{', '.join(layer)}}}")
    else:
        out.append(f"strong extinction (first-order): not applicable ({strong['reason']})")
    return "\n".join(out) + "\n"


def _render_lyapunov(lyap: dict, net: dict) -> list[str]:
    if lyap["method"] is None:
        return [f"lyapunov: {lyap['message']}"]
    out = [f"lyapunov ({lyap['method']}): w = {_fmt_list(lyap['w'])}, edge signs {''.join(lyap['edge_signs'])}"]
    tr = lyap.get("trace")
    if tr:
        names = net["vertices"]

        def vs(ix):
            return "{" + ", ".join(names[i] for i in ix) + "}"

        out.append(f"  L1 = {vs(tr['linkage_class'])}, SC1 = {vs(tr['terminal_scc'])}, V1 = {vs(tr['component'])}")
        out.append(
            f"  crossing edge e{tr['crossing_edge']}; dim S = {tr['dim_S']} = {tr['dim_S1']} + {tr['dim_S2']} + 1"
        )
    return out


# -- commands -------------------------------------------------------------------


def cmd_analyze(args) -> int:
    net, _ = _load(args.path)
    report = build_report(net)
    sys.stdout.write(dumps(report) if args.json else render_text(report))
    return EXIT_OK


def cmd_lyapunov(args) -> int:
    net, _ = _load(args.path)
    verdict = is_consistent(net)
    sec = _lyapunov_section(net, verdict)
    if sec.get("w") is not None:
        dots = stoichiometric_matrix(net).vecmat([Fraction(x) for x in sec["w"]])
        if any(d > 0 for d in dots) or not any(d < 0 for d in dots):
            raise AssertionError("Lyapunov vector failed re-verification")
    if args.json:
        sys.stdout.write(dumps(sec))
    else:
        sys.stdout.write("\n".join(_render_lyapunov(sec, {"vertices": [net.complex_str(i) for i in range(net.n_vertices)]})) + "\n")
    return EXIT_OK


def _simulate(net, rates, args) -> Trajectory:
    sysm = _system(net, rates, args.k)
    x0 = _parse_state(args.x0, net.n_species) if args.x0 else np.ones(net.n_species)
    if not args.t_end > 0:
        raise UsageError("--t-end must be positive")
    stride = args.stride if args.stride else args.t_end / 1000
    try:
        opts = IntegrateOptions(args.t_end, rtol=args.rtol, atol=args.atol, dense_output_stride=stride)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return integrate(sysm, x0, opts)


def cmd_simulate(args) -> int:
    net, rates = _load(args.path)
    traj = _simulate(net, rates, args)
    if args.out:
        traj.write_csv(args.out)
    else:
        traj.write_csv(sys.stdout)
    log = sys.stdout if args.out else sys.stderr
    final = ", ".join(f"{n}={v:.10g}" for n, v in zip(net.species, traj.final))
    print(f"final state at t={traj.times[-1]:g}: {final}", file=log)
    for key, drift in traj.meta["conservation_drift"].items():
        print(f"conservation drift of ({key}) . x: {drift:.3e}", file=log)
    print(
        f"steps: {traj.meta['accepted_steps']} accepted, {traj.meta['rejected_steps']} rejected",
        file=log,
    )
    return EXIT_OK


def cmd_extinction(args) -> int:
    net, rates = _load(args.path)
    if not 0 < args.eps_strong <= args.eps_weak:
        raise UsageError("need 0 < --eps-strong <= --eps-weak")
    result = {"strong": _strong_section(net), "weak_certificate": _certificate_section(net)}
    _check_weak_certificate(stoichiometric_matrix(net), result["weak_certificate"])
    if args.simulate:
        traj = _simulate(net, rates, args)
        fates = trajectory_extinction_report(traj, args.eps_weak, args.eps_strong)
        result["simulation"] = {
            "t_end": float(traj.times[-1]),
            "eps_weak": args.eps_weak,
            "eps_strong": args.eps_strong,
            "bounded": is_conservative(net) is not None,
            "species": [
                {
                    "species": f.species,
                    "running_min": f.running_min,
                    "tail_min": f.tail_min,
                    "tail_max": f.tail_max,
                    "final": f.final,
                    "weak_candidate": f.weak_candidate,
                    "strong_candidate": f.strong_candidate,
                }
                for f in fates
            ],
        }
    if args.json:
        sys.stdout.write(dumps(result))
        return EXIT_OK
    s = result["strong"]
    if s["applicable"]:
        print(f"strong extinction (first-order): {{{', '.join(s['species'])}}}")
        for i, layer in enumerate(s["layers"], start=1):
            print(f"  N{i} = {{{', '.join(layer)}}}")
    else:
        print(f"strong extinction (first-order): not applicable ({s['reason']})")
    c = result["weak_certificate"]
    line = f"weak extinction certificate: {c['kind']}"
    if c["kind"] == "WeakGuaranteed":
        line += f" (w = {_fmt_list(c['separator'])}, c = {_fmt_list(c['conservation'])})"
    else:
        line += " (consistent)" if c["hypotheses"]["consistent"] else " (no positive conservation law)"
    print(line)
    sim = result.get("simulation")
    if sim:
        if not sim["bounded"]:
            print("warning: no positive conservation law; trajectories may be unbounded")
        print(f"simulation to t={sim['t_end']:g} (eps_weak={sim['eps_weak']:g}, eps_strong={sim['eps_strong']:g}):")
        for f in sim["species"]:
            flags = [n for n, on in (("weak", f["weak_candidate"]), ("strong", f["strong_candidate"])) if on]
            print(
                f"  {f['species']}: min={f['running_min']:.3e} tail=[{f['tail_min']:.3e}, {f['tail_max']:.3e}] "
                f"final={f['final']:.3e} candidates: {', '.join(flags) or 'none'}"
            )
    return EXIT_OK


def cmd_plot(args) -> int:
    try:
        traj = Trajectory.read_csv(args.csv_path)
    except OSError as exc:
        raise UsageError(f"cannot read {args.csv_path}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise UsageError(f"malformed trajectory CSV: {exc}") from None
    title = Path(args.csv_path).stem
    try:
        svg = simplex_svg(traj, title) if args.projection == "simplex" else timeseries_svg(traj, title)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = args.svg or str(Path(args.csv_path).with_suffix(".svg"))
    Path(out).write_text(svg, encoding="utf-8")
    print(f"wrote {out}")
    return EXIT_OK


def _add_sim_flags(p):
    p.add_argument("--x0", help="initial state, comma separated (default: all ones)")
    p.add_argument("--t-end", type=float, default=100.0, dest="t_end")
    p.add_argument("--rtol", type=float, default=1e-8)
    p.add_argument("--atol", type=float, default=1e-10)
    p.add_argument("--stride", type=float, default=None, help="sample spacing (default t_end/1000)")
    p.add_argument("--k", default=None, help="uniform rate and/or per-edge overrides, e.g. '1' or 'e0=1.5,e2=0.3'")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crnext", description="Reaction network structure, Lyapunov and extinction analysis.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="structural report")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="integrate the mass-action ODE and write a CSV")
    p.add_argument("path")
    p.add_argument("--out", help="CSV output file (default stdout)")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("lyapunov", help="linear Lyapunov function, if one exists")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lyapunov)

    p = sub.add_parser("extinction", help="structural extinction results, optional simulation evidence")
    p.add_argument("path")
    p.add_argument("--simulate", action="store_true")
    p.add_argument("--eps-weak", type=float, default=DEFAULT_EPS_WEAK, dest="eps_weak")
    p.add_argument("--eps-strong", type=float, default=DEFAULT_EPS_STRONG, dest="eps_strong")
    p.add_argument("--json", action="store_true")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_extinction)

    p = sub.add_parser("plot", help="render a trajectory CSV as SVG")
    p.add_argument("csv_path")
    p.add_argument("--svg", help="output file (default: CSV name with .svg)")
    p.add_argument("--projection", choices=["simplex", "time-series"], default="time-series")
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        for d in exc.diagnostics:
            print(f"{getattr(args, 'path', '')}:{d.line}:{d.column}: {type(exc).__name__}: {d.message}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CrnError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort reporting, stable exit code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def run() -> None:
    sys.exit(main())
