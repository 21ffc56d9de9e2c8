"""Command-line front end: ``run``, ``verify``, ``curvature`` and ``sweep``.

Exit codes: 0 success; 1 usage error, failed oracle or inapplicable oracle;
2 when an integration ends in DomainExit or StepUnderflow, or when a
curvature query falls outside the domain.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import io
import json
import math
import sys
import time

import numpy as np

from coneflow import oracles
from coneflow.errors import (
    BranchUnavailable,
    DomainError,
    IntegrationError,
    InvalidInitialState,
    OracleError,
)
from coneflow.flows import Flow, FlowKind, dirac_constraint, verify_prop1
from coneflow.geometry import (
    TwoParamJet,
    asd_residual,
    connection_form,
    contact_pairing,
    ricci_ambient,
    ricci_bar,
)
from coneflow.integrator import IntegratorConfig, StopReason, integrate

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------------
# settings


_DEFAULT_INIT = {
    Flow.RICCI_ROUND: (math.sqrt(8.0),),
    Flow.DIRAC: (0.0, 1.0),
    Flow.RICCI_BERGER: (8.0, 8.0),
    Flow.NORMALIZED_BERGER: (2.0, 1.0),
    Flow.ASD: (0.0, 1.0),
    Flow.FLOW9: (1.0, 1.0),
    Flow.HITCHIN: (0.0, 1.0),
}

_DEFAULT_STEP = {Flow.ASD: 1e-4, Flow.HITCHIN: 1e-4, Flow.FLOW9: 1e-4}

# keys accepted in a config file, with their parsers
_CONFIG_KEYS = {
    "flow": str,
    "k": int,
    "init": str,
    "t_end": float,
    "step": float,
    "adaptive": None,
    "rel_tol": float,
    "abs_tol": float,
    "collapse_eps": float,
    "max_samples": int,
    "continue_past_collapse": None,
    "out": str,
    "format": str,
    "backend": str,
    "oracle": str,
    "tol": float,
    "grid": str,
    "jobs": int,
}


def _parse_bool(text):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def read_config(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    values = {}
    for number, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{number}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{number}: unknown key {key!r}")
        convert = _CONFIG_KEYS[key] or _parse_bool
        try:
            values[key] = convert(value)
        except ValueError:
            raise UsageError(f"{path}:{number}: bad value for {key}: {value!r}") from None
    return values


def _merged(args):
    """Flags override the config file; unset keys stay absent."""
    settings = read_config(args.config) if getattr(args, "config", None) else {}
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def parse_init(text, flow):
    names = flow.components
    values = {}
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise UsageError(f"init entry {item!r} is not name=value")
        key, value = (part.strip() for part in item.split("=", 1))
        if key not in names:
            raise UsageError(f"unknown init component {key!r} for {flow.value}; expected {','.join(names)}")
        try:
            values[key] = float(value)
        except ValueError:
            raise UsageError(f"init value for {key} is not a number: {value!r}") from None
    missing = [n for n in names if n not in values]
    if missing:
        raise UsageError(f"init is missing {','.join(missing)} for {flow.value}")
    return tuple(values[n] for n in names)


def _kind_and_config(settings):
    if "flow" not in settings:
        raise UsageError("--flow is required")
    try:
        flow = Flow(settings["flow"])
    except ValueError:
        raise UsageError(f"unknown flow {settings['flow']!r}; choose from {', '.join(f.value for f in Flow)}") from None
    k = settings.get("k", 1 if flow is Flow.DIRAC else 0)
    if flow is not Flow.DIRAC and "k" in settings:
        raise UsageError("--k only applies to the dirac flow")
    try:
        kind = FlowKind(flow, k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    init = parse_init(settings["init"], flow) if "init" in settings else _DEFAULT_INIT[flow]
    if flow is Flow.DIRAC:
        t_end = 1.5 if k == 1 else 3.0
    elif flow is Flow.NORMALIZED_BERGER:
        t_end = 10.0
    elif flow in (Flow.RICCI_ROUND, Flow.RICCI_BERGER):
        t_end = 100.0
    else:
        t_end = 2.0
    try:
        cfg = IntegratorConfig(
            t_end=settings.get("t_end", t_end),
            step=settings.get("step", _DEFAULT_STEP.get(flow, 1e-3)),
            adaptive=settings.get("adaptive", True),
            rel_tol=settings.get("rel_tol", 1e-10),
            abs_tol=settings.get("abs_tol", 1e-12),
            collapse_eps=settings.get("collapse_eps", 1e-6),
            max_samples=settings.get("max_samples", 10_000_000),
            continue_past_collapse=settings.get("continue_past_collapse", False),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return kind, init, cfg


def _integrate(kind, init, cfg, backend):
    try:
        return integrate(kind, init, cfg, backend=backend)
    except (InvalidInitialState, IntegrationError) as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# --------------------------------------------------------------------------
# formatting


def fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    return format(float(value), ".17g")


def _meta(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    return repr(value)


def _init_text(kind, init):
    return ",".join(f"{n}={fmt(v)}" for n, v in zip(kind.flow.components, init))


def _config_dict(cfg):
    return {
        "t_end": cfg.t_end,
        "step": cfg.step,
        "adaptive": cfg.adaptive,
        "rel_tol": cfg.rel_tol,
        "abs_tol": cfg.abs_tol,
        "collapse_eps": cfg.collapse_eps,
        "max_samples": cfg.max_samples,
        "continue_past_collapse": cfg.continue_past_collapse,
    }


def _stop_dict(stop):
    return {
        "reason": stop.reason.value,
        "t_stop": stop.t_stop,
        "component": stop.component,
        "detail": stop.detail,
    }


def _stop_text(stop):
    text = f"{stop.reason.value} t_stop={fmt(stop.t_stop)}"
    if stop.component:
        text += f" component={stop.component}"
    if stop.detail:
        text += f" detail={stop.detail}"
    return text


def trajectory_table(traj, continued=False):
    """Column names and columns written by ``run``.

    ASD residual columns are the denominator-cleared defects evaluated with
    second-order differences of the stored samples.
    """
    names = ["t", *traj.components]
    columns = [traj.t, *traj.y.T]
    flow = traj.kind.flow
    if flow is Flow.DIRAC:
        names.append("constraint_residual")
        columns.append(dirac_constraint(traj.y[:, 0], traj.y[:, 1], traj.kind.k))
    elif flow is Flow.ASD:
        if len(traj) >= 3:
            d1 = np.gradient(traj.y[:, 0], traj.t, edge_order=2)
            d2 = np.gradient(traj.y[:, 1], traj.t, edge_order=2)
            res1, res2 = oracles.asd_defects(traj.y[:, 0], traj.y[:, 1], d1, d2)
        else:
            res1 = res2 = np.full(len(traj), math.nan)
        names += ["asd_res1", "asd_res2"]
        columns += [res1, res2]
    if continued:
        names.append("nonriemannian")
        columns.append(traj.nonriemannian)
    return names, columns


def write_csv(stream, traj, init, cfg):
    kind = traj.kind
    names, columns = trajectory_table(traj, cfg.continue_past_collapse)
    stream.write(f"# flow: {kind.name}\n")
    stream.write(f"# init: {_init_text(kind, init)}\n")
    settings = " ".join(f"{k}={_meta(v)}" for k, v in _config_dict(cfg).items())
    stream.write(f"# config: {settings}\n")
    stream.write(",".join(names) + "\n")
    for row in zip(*columns):
        stream.write(",".join(fmt(v) for v in row) + "\n")
    stream.write(f"# stop: {_stop_text(traj.stop)}\n")


def _json_number(value):
    value = float(value)
    return value if math.isfinite(value) else None


def write_json(stream, traj, init, cfg):
    names, columns = trajectory_table(traj, cfg.continue_past_collapse)
    rows = [
        [int(v) if isinstance(v, (bool, np.bool_)) else _json_number(v) for v in row]
        for row in zip(*columns)
    ]
    doc = {
        "flow": traj.kind.name,
        "init": dict(zip(traj.components, init)),
        "config": _config_dict(cfg),
        "columns": names,
        "rows": rows,
        "stop": _stop_dict(traj.stop),
    }
    json.dump(doc, stream, indent=1)
    stream.write("\n")


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            with open(out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc.strerror}") from None


def _exit_for(stop):
    if stop.reason in (StopReason.DOMAIN_EXIT, StopReason.STEP_UNDERFLOW):
        return EXIT_DOMAIN
    return EXIT_OK


# --------------------------------------------------------------------------
# run


def cmd_run(args):
    settings = _merged(args)
    kind, init, cfg = _kind_and_config(settings)
    form = settings.get("format", "csv")
    if form not in ("csv", "json"):
        raise UsageError(f"unknown format {form!r}")
    traj = _integrate(kind, init, cfg, settings.get("backend"))
    buf = io.StringIO()
    (write_csv if form == "csv" else write_json)(buf, traj, init, cfg)
    _emit(buf.getvalue(), settings.get("out"))
    return _exit_for(traj.stop)


# --------------------------------------------------------------------------
# verify


ORACLES = ("closed-form", "eh-match", "einstein", "volume", "beta-ode", "implicit7", "slopes", "prop1")

DEFAULT_TOL = {
    "closed-form": 1e-6,
    "eh-match": 1e-6,
    "einstein": 1e-5,
    "volume": 1e-8,
    "beta-ode": 1e-4,
    "implicit7": 1e-6,
    "slopes": 0.16,
    "prop1": 1e-10,
}


def _closed_form_kind(kind, init, t0):
    flow = kind.flow
    if flow is Flow.DIRAC:
        if init != (0.0, 1.0) or t0 != 0.0:
            raise UsageError("closed-form for dirac needs init f=0,df=1")
        return oracles.DiracProfile(kind.k)
    if flow is Flow.RICCI_ROUND:
        return oracles.RicciRoundProfile(t0 + init[0] ** 2 / 8.0)
    if flow is Flow.RICCI_BERGER:
        alpha, beta = init
        if alpha == 0.0:
            return oracles.Bolt(t0 + beta / 16.0)
        if alpha == beta:
            return oracles.Nut(t0 + beta / 8.0)
        raise UsageError("closed-form for ricci2 needs a nut (alpha=beta) or bolt (alpha=0) start")
    raise UsageError(f"closed-form is not available for {flow.value}")


def _applicable(name, kind, init):
    flow = kind.flow
    if name == "closed-form":
        _closed_form_kind(kind, init, 0.0)
    elif name == "eh-match":
        if flow not in (Flow.ASD, Flow.HITCHIN) or init[0] != 0.0:
            raise UsageError("eh-match needs an asd or hitchin run from a1=0")
    elif name == "einstein":
        if flow not in (Flow.DIRAC, Flow.ASD, Flow.HITCHIN, Flow.FLOW9):
            raise UsageError(f"einstein is not available for {flow.value}")
    elif name == "volume":
        if flow is not Flow.NORMALIZED_BERGER:
            raise UsageError("volume needs the nricci2 flow")
    elif name in ("beta-ode", "implicit7", "slopes"):
        if flow is not Flow.RICCI_BERGER:
            raise UsageError(f"{name} needs the ricci2 flow")
    elif name == "prop1":
        if flow is not Flow.DIRAC:
            raise UsageError("prop1 needs the dirac flow")
    else:
        raise UsageError(f"unknown oracle {name!r}; choose from {', '.join(ORACLES)}")


def run_oracle(name, traj, init, tol):
    """Evaluate one oracle; returns a JSON-ready dict with a ``passed`` flag."""
    kind = traj.kind
    if name == "closed-form":
        target = _closed_form_kind(kind, init, float(traj.t[0]))
        return oracles.match_closed_form(traj, target, tol).as_dict()
    if name == "eh-match":
        return oracles.eh_match(traj, init[1], tol).as_dict()
    if name == "einstein":
        k = kind.k if kind.flow is Flow.DIRAC else 0
        t, jets = oracles.trajectory_jets(traj)
        return oracles.report(t, [oracles.einstein_residual(j, k) for j in jets], tol).as_dict()
    if name == "volume":
        vol = oracles.volume(traj.y[:, 0], traj.y[:, 1])
        return oracles.report(traj.t, vol - vol[0], tol).as_dict()
    if name == "beta-ode":
        t, res = oracles.beta_second_order_residual(traj)
        return oracles.report(t, res, tol).as_dict()
    if name == "implicit7":
        fit = oracles.implicit7_check(traj)
        out = oracles.report(fit.t, fit.residual, tol).as_dict()
        out.update(c1=fit.c1, c2=fit.c2)
        return out
    if name == "slopes":
        da, db = oracles.singularity_slopes(traj)
        dev = max(abs(da + 8.0), abs(db + 8.0))
        return {
            "alpha_slope": da,
            "beta_slope": db,
            "max_abs_deviation": dev,
            "passed": dev <= tol,
            "tolerance": tol,
        }
    if name == "prop1":
        upper = math.pi if kind.k == 1 else 3.0
        points = np.linspace(0.0, upper, 102)[1:-1]
        res = [verify_prop1(kind.k, float(t)) for t in points]
        return oracles.report(points, res, tol).as_dict()
    raise UsageError(f"unknown oracle {name!r}")


def cmd_verify(args):
    settings = _merged(args)
    kind, init, cfg = _kind_and_config(settings)
    names = [n.strip() for n in settings.get("oracle", "").split(",") if n.strip()]
    if not names:
        raise UsageError("--oracle is required")
    for name in names:
        _applicable(name, kind, init)
    started = time.perf_counter()
    traj = _integrate(kind, init, cfg, settings.get("backend"))
    results = {}
    for name in names:
        tol = settings.get("tol", DEFAULT_TOL[name])
        try:
            results[name] = run_oracle(name, traj, init, tol)
        except (OracleError, DomainError) as exc:
            status = "branch-unavailable" if isinstance(exc, BranchUnavailable) else "error"
            results[name] = {"passed": False, "tolerance": tol, status: str(exc)}
    passed = all(r["passed"] for r in results.values())
    doc = {
        "flow": kind.name,
        "init": dict(zip(kind.flow.components, init)),
        "config": _config_dict(cfg),
        "stop": _stop_dict(traj.stop),
        "oracles": results,
        "pass": passed,
        "wall_time": time.perf_counter() - started,
    }
    _emit(json.dumps(doc, indent=2, default=_json_default) + "\n", settings.get("out"))
    return EXIT_OK if passed else EXIT_USAGE


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


# --------------------------------------------------------------------------
# curvature


def _curvature_jet(args):
    if args.profile == "eh":
        if args.a is None or args.r is None:
            raise UsageError("--profile eh needs --a and --r")
        if args.r == args.a:
            raise DomainError("the profile parameter t is singular at the bolt r = a", component=0)
        return oracles.eh_jet(args.a, args.r)
    if args.a1 is None or args.a2 is None:
        raise UsageError("--a1 and --a2 are required without --profile")
    if (args.dda1 is None) != (args.dda2 is None):
        raise UsageError("give both --dda1 and --dda2 or neither")
    return TwoParamJet(args.a1, args.a2, args.da1, args.da2, args.dda1, args.dda2)


def curvature_report(jet):
    omega = connection_form(jet)
    bar = ricci_bar(jet.a1, jet.a2)
    asd = asd_residual(jet)
    doc = {
        "point": {"a1": jet.a1, "a2": jet.a2, "da1": jet.da1, "da2": jet.da2,
                  "dda1": jet.dda1, "dda2": jet.dda2},
        "ricci_bar": {"ric11": bar.ric11, "ric22": bar.ric22, "ric33": bar.ric33,
                      "scalar": bar.scalar},
        "connection_form": {f"{i}{j}": [omega.coefficient(i, j, k) for k in range(4)]
                            for i in range(4) for j in range(i + 1, 4)},
        "asd_residual": {"rho1": asd.rho1, "rho2": asd.rho2},
        "contact_pairing": {str(i): contact_pairing(i, jet.a1, jet.a2) for i in (1, 2, 3)},
    }
    if jet.has_second:
        amb = ricci_ambient(jet)
        doc["ricci_ambient"] = {"ric00": amb.ric00, "ric11": amb.ric11, "ric22": amb.ric22,
                                "ric33": amb.ric33, "scalar": amb.scalar}
    return doc


def _human(doc):
    g = lambda v: format(v + 0.0, ".10g")  # noqa: E731  (+0.0 folds -0 into 0)
    p = doc["point"]
    lines = [f"point: a1={g(p['a1'])} a2={g(p['a2'])} a1'={g(p['da1'])} a2'={g(p['da2'])}"]
    r = doc["ricci_bar"]
    lines.append(f"restricted Ricci: ({g(r['ric11'])}, {g(r['ric22'])}, {g(r['ric33'])})  scalar {g(r['scalar'])}")
    if "ricci_ambient" in doc:
        r = doc["ricci_ambient"]
        lines.append(
            f"ambient Ricci: ({g(r['ric00'])}, {g(r['ric11'])}, {g(r['ric22'])}, {g(r['ric33'])})"
            f"  scalar {g(r['scalar'])}"
        )
    lines.append("connection form omega^i_j (eps0..eps3 coefficients):")
    for pair, coeffs in doc["connection_form"].items():
        lines.append(f"  {pair}: " + " ".join(g(c) for c in coeffs))
    a = doc["asd_residual"]
    lines.append(f"ASD residuals: {g(a['rho1'])} {g(a['rho2'])}")
    c = doc["contact_pairing"]
    lines.append(f"contact pairings: {g(c['1'])} {g(c['2'])} {g(c['3'])}")
    return "\n".join(lines) + "\n"


def cmd_curvature(args):
    try:
        jet = _curvature_jet(args)
        doc = curvature_report(jet)
    except DomainError as exc:
        print(f"coneflow: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    sys.stdout.write(json.dumps(doc, indent=2) + "\n" if args.json else _human(doc))
    return EXIT_OK


# --------------------------------------------------------------------------
# sweep


def parse_grid(text, flow):
    axes = {}
    for item in text.split(","):
        if "=" not in item:
            raise UsageError(f"grid entry {item!r} is not name=start:stop:count")
        key, span = (part.strip() for part in item.split("=", 1))
        if key not in flow.components:
            raise UsageError(f"unknown grid component {key!r} for {flow.value}")
        parts = span.split(":")
        try:
            if len(parts) == 1:
                values = [float(parts[0])]
            elif len(parts) == 3 and int(parts[2]) >= 1:
                values = list(np.linspace(float(parts[0]), float(parts[1]), int(parts[2])))
            else:
                raise ValueError
        except ValueError:
            raise UsageError(f"bad grid range {span!r}; use start:stop:count") from None
        axes[key] = values
    if sorted(axes) != sorted(flow.components):
        raise UsageError(f"grid must cover {','.join(flow.components)}")
    return [axes[n] for n in flow.components]


def classify(traj, init):
    """Qualitative outcome of a Berger Ricci flow cell."""
    if traj.stop.reason in (StopReason.DOMAIN_EXIT, StopReason.STEP_UNDERFLOW):
        return "domain-exit"
    if traj.stop.reason is StopReason.REACHED_T_END:
        return "horizon"
    alpha0, beta0 = init
    if alpha0 == 0.0:
        return "bolt-collapse"
    if alpha0 == beta0:
        return "nut-collapse"
    alpha, beta = traj.y[~traj.nonriemannian][-1]
    if abs(alpha / beta - 1.0) < 0.01:
        return "merge-then-collapse"
    return "bolt-collapse"


def cmd_sweep(args):
    settings = _merged(args)
    kind, _, cfg = _kind_and_config(settings)
    if kind.flow is not Flow.RICCI_BERGER:
        raise UsageError("sweep classifies ricci2 trajectories only")
    if "grid" not in settings:
        raise UsageError("--grid is required")
    first, second = parse_grid(settings["grid"], kind.flow)
    cells = [(i, j, (x, y)) for i, x in enumerate(first) for j, y in enumerate(second)]
    estimate = len(cells) * math.ceil(cfg.t_end / cfg.step)
    if estimate > cfg.max_samples:
        raise UsageError(
            f"grid too large: {len(cells)} cells x {math.ceil(cfg.t_end / cfg.step)} steps "
            f"exceeds max_samples={cfg.max_samples}"
        )
    backend = settings.get("backend")
    jobs = settings.get("jobs", 1)
    if jobs < 1:
        raise UsageError("--jobs must be at least 1")

    def work(cell):
        return _integrate(kind, cell[2], cfg, backend)

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        trajectories = list(pool.map(work, cells))

    names = kind.flow.components
    header = ["i", "j", *names, "class", "stop", "component", "t_stop",
              *(f"final_{n}" for n in names), "final_ratio"]
    buf = io.StringIO()
    buf.write(f"# sweep: {kind.name} grid={settings['grid']}\n")
    buf.write(",".join(header) + "\n")
    for (i, j, init), traj in zip(cells, trajectories):
        final = traj.y[~traj.nonriemannian][-1]
        ratio = final[0] / final[1] if final[1] > 0 else math.nan
        row = [str(i), str(j), *(fmt(v) for v in init), classify(traj, init),
               traj.stop.reason.value, traj.stop.component or "", fmt(traj.stop.t_stop),
               *(fmt(v) for v in final), fmt(ratio)]
        buf.write(",".join(row) + "\n")
    _emit(buf.getvalue(), settings.get("out"))
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _add_run_options(p):
    p.add_argument("--flow", help="flow name: " + ", ".join(f.value for f in Flow))
    p.add_argument("--k", type=int, help="curvature sign for the dirac flow (-1, 0, 1)")
    p.add_argument("--init", help="initial state, e.g. a1=0,a2=1")
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--step", type=float, help="initial and maximal step")
    p.add_argument("--adaptive", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--rel-tol", dest="rel_tol", type=float)
    p.add_argument("--abs-tol", dest="abs_tol", type=float)
    p.add_argument("--collapse-eps", dest="collapse_eps", type=float)
    p.add_argument("--max-samples", dest="max_samples", type=int)
    p.add_argument("--continue-past-collapse", dest="continue_past_collapse",
                   action="store_true", default=None)
    p.add_argument("--backend", choices=("compiled", "python"))
    p.add_argument("--config", help="key = value settings file; flags take precedence")
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser():
    parser = _Parser(prog="coneflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("run", help="integrate a flow and write the trajectory")
    _add_run_options(p)
    p.add_argument("--format", choices=("csv", "json"))

    p = sub.add_parser("verify", help="integrate a flow and check it against oracles")
    _add_run_options(p)
    p.add_argument("--oracle", help="comma-separated: " + ",".join(ORACLES))
    p.add_argument("--tol", type=float, help="tolerance applied to every selected oracle")

    p = sub.add_parser("curvature", help="curvature of the cone metric at one point")
    p.add_argument("--a1", type=float)
    p.add_argument("--a2", type=float)
    p.add_argument("--da1", type=float, default=0.0)
    p.add_argument("--da2", type=float, default=0.0)
    p.add_argument("--dda1", type=float)
    p.add_argument("--dda2", type=float)
    p.add_argument("--profile", choices=("eh",))
    p.add_argument("--a", type=float, help="Eguchi-Hanson bolt radius")
    p.add_argument("--r", type=float, help="Eguchi-Hanson radius")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("sweep", help="classify ricci2 runs over a grid of initial data")
    _add_run_options(p)
    p.add_argument("--grid", help="e.g. alpha=1:8:8,beta=1:8:8")
    p.add_argument("--jobs", type=int)
    return parser


_COMMANDS = {"run": cmd_run, "verify": cmd_verify, "curvature": cmd_curvature, "sweep": cmd_sweep}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: run, verify, curvature or sweep")
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"coneflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
