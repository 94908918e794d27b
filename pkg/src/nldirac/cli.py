"""Command-line interface: verification runs, field maps, ODE runs, reports.

Natural units throughout (hbar = c = 1); with the default mass 1.0 all grid
radii read directly in Compton lengths.  Precedence: command-line flags
override the --config JSON file, which overrides built-in defaults.  All
outputs are deterministic functions of the resolved configuration (random
suites are seeded, no wall-clock data is emitted).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import equations, grids, ode, singular, verify
from .errors import DivergingState, StepUnderflow
from .polar import ModelSpec

SCHEMA = "1"


FIELDMAP_GRID = grids.GridConfig(r_min=0.01, r_max=100.0, n_r=200, n_theta=100)


@dataclasses.dataclass
class RunConfig:
    model: str = "njl"          # "njl" | "soler" | "p"
    p: float = 1.0
    mass: float = 1.0
    grid: grids.GridConfig = None   # command-specific default when unset
    seed: int = 42
    tolerances: dict = dataclasses.field(default_factory=dict)
    mask_margin: float = equations.DEFAULT_MASK_MARGIN
    out: str = None
    fmt: str = None             # "csv" | "json"
    scan_el: bool = False
    energy: float = None        # overrides E = m when set
    angular_momentum: float = None  # overrides l = 1/2 when set

    def grid_or(self, default: grids.GridConfig) -> grids.GridConfig:
        return self.grid if self.grid is not None else default

    @property
    def model_name(self):
        if self.model == "p":
            return f"p:{self.p:g}"
        return self.model

    def spec(self) -> ModelSpec:
        kw = {"m": self.mass, "p": self.p}
        if self.energy is not None:
            kw["E"] = self.energy
        if self.angular_momentum is not None:
            kw["l"] = self.angular_momentum
        return ModelSpec(**kw)


def _parse_model(text):
    if text in ("njl", "soler"):
        return text, {"njl": 1.0, "soler": 0.0}[text]
    if text.startswith("p:"):
        p = float(text[2:])
        if not 0.0 <= p <= 1.0:
            raise argparse.ArgumentTypeError("interpolation parameter must be in [0,1]")
        return "p", p
    raise argparse.ArgumentTypeError(
        f"unknown model {text!r}; expected njl, soler or p:<value>"
    )


def _parse_grid(text):
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("--grid expects r_min,r_max,n_r,n_theta")
    r_min, r_max = float(parts[0]), float(parts[1])
    n_r, n_theta = int(parts[2]), int(parts[3])
    return r_min, r_max, n_r, n_theta


def _parse_tol(items):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise argparse.ArgumentTypeError("--tol expects name=value")
        name, value = item.split("=", 1)
        out[name.strip()] = float(value)
    return out


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nldirac",
        description="Verify and explore the closed-form solutions of the "
                    "nonlinear Dirac models on a flat spherical background.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("verify", "run all identity and field-equation suites"),
        ("fieldmap", "write the matter distribution on a grid as CSV"),
        ("ode", "integrate the scalar-model radial system"),
        ("locus", "report singular locus and asymptotics"),
        ("report", "aggregate verify + locus (+ ode) into one JSON document"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--model", default=None,
                         help="njl | soler | p:<value> (default njl)")
        cmd.add_argument("--mass", type=float, default=None,
                         help="field mass m > 0 (default 1.0)")
        cmd.add_argument("--p", dest="p_flag", type=float, default=None,
                         help="interpolation parameter; shorthand for --model p:<v>")
        cmd.add_argument("--grid", default=None, metavar="r_min,r_max,n_r,n_theta",
                         help="radii in units of 1/m, log-spaced")
        cmd.add_argument("--seed", type=int, default=None,
                         help="seed for the random-spinor/point suites (default 42)")
        cmd.add_argument("--tol", action="append", default=None, metavar="name=value",
                         help="override a suite tolerance (or rtol/atol for ode)")
        cmd.add_argument("--mask-margin", type=float, default=None,
                         help="half-width of the singular-region mask (default 0.02)")
        cmd.add_argument("--out", default=None, help="output file path")
        cmd.add_argument("--format", dest="fmt", choices=("csv", "json"),
                         default=None, help="output format where applicable")
        cmd.add_argument("--scan-el", action="store_true",
                         help="ode: add the (E/m, l) quantum-number scan")
        cmd.add_argument("--config", default=None,
                         help="JSON config file; flags take precedence")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = RunConfig()
    file_cfg = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            file_cfg = json.load(fh)
    # config file layer
    if "model" in file_cfg:
        cfg.model, cfg.p = _parse_model(file_cfg["model"])
    if "p" in file_cfg:
        cfg.model, cfg.p = "p", float(file_cfg["p"])
    if "mass" in file_cfg:
        cfg.mass = float(file_cfg["mass"])
    grid_kw = dict(file_cfg.get("grid", {}))
    if "seed" in file_cfg:
        cfg.seed = int(file_cfg["seed"])
    cfg.tolerances.update(file_cfg.get("tolerances", {}))
    if "mask_margin" in file_cfg:
        cfg.mask_margin = float(file_cfg["mask_margin"])
    for key in ("E", "energy"):
        if key in file_cfg:
            cfg.energy = float(file_cfg[key])
    for key in ("l", "angular_momentum"):
        if key in file_cfg:
            cfg.angular_momentum = float(file_cfg[key])
    if "out" in file_cfg:
        cfg.out = file_cfg["out"]
    if "format" in file_cfg:
        cfg.fmt = file_cfg["format"]
    # flag layer
    if args.model:
        cfg.model, cfg.p = _parse_model(args.model)
    if args.p_flag is not None:
        cfg.model, cfg.p = "p", float(args.p_flag)
    if args.mass is not None:
        cfg.mass = args.mass
    if args.grid:
        r_min, r_max, n_r, n_theta = _parse_grid(args.grid)
        grid_kw.update(r_min=r_min, r_max=r_max, n_r=n_r, n_theta=n_theta)
    if args.seed is not None:
        cfg.seed = args.seed
    cfg.tolerances.update(_parse_tol(args.tol))
    if args.mask_margin is not None:
        cfg.mask_margin = args.mask_margin
    if args.out is not None:
        cfg.out = args.out
    if args.fmt is not None:
        cfg.fmt = args.fmt
    cfg.scan_el = bool(args.scan_el)
    if grid_kw:
        cfg.grid = grids.GridConfig(**grid_kw)
    if cfg.mass <= 0:
        raise SystemExit("mass must be positive")
    return cfg


def _emit_json(doc, out_path):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_verify(cfg: RunConfig):
    report = verify.run_suites(
        cfg.spec(), cfg.model_name, grid_cfg=cfg.grid_or(grids.GridConfig()),
        seed=cfg.seed, tolerances=cfg.tolerances, margin=cfg.mask_margin,
    )
    for name in sorted(report["suites"]):
        suite = report["suites"][name]
        status = "pass" if suite["pass"] else "FAIL"
        print(f"{status}  {name}: max residual {suite['max_residual']:.3e} "
              f"(tol {suite['tolerance']:.1e})", file=sys.stderr)
    _emit_json(report, cfg.out)
    if not report["pass"]:
        print("failing suites: " + ", ".join(report["failing_suites"]),
              file=sys.stderr)
        return 1
    return 0


def cmd_fieldmap(cfg: RunConfig):
    spec = cfg.spec()
    model = cfg.model if cfg.model != "p" else cfg.p
    p = equations.model_p(model)
    grid_cfg = cfg.grid_or(FIELDMAP_GRID)
    rs = grids.radii(grid_cfg, m=spec.m)
    ths = grids.thetas(grid_cfg)
    from .polar import X_exact, chiral_components, phi2_grid

    rows = []
    for r in rs:
        X = float(X_exact(r, spec))
        for th in ths:
            with np.errstate(divide="ignore", invalid="ignore"):
                phi2 = float(phi2_grid(model, r, th, spec.m))
                sb, cb = chiral_components(X, float(th))
            masked = equations.is_masked(
                grids.GridPoint(float(r), float(th)), spec, p, cfg.mask_margin
            )
            rows.append((float(r), float(th), phi2, float(sb), float(cb), X,
                         masked))
    out_path = cfg.out or "fieldmap.csv"
    if cfg.fmt == "json":
        doc = {
            "schema": SCHEMA,
            "model": cfg.model_name,
            "columns": ["r", "theta", "phi2", "sin_beta", "cos_beta", "X", "masked"],
            "rows": [list(row[:6]) + [bool(row[6])] for row in rows],
        }
        _emit_json(doc, cfg.out)
        return 0
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("r,theta,phi2,sin_beta,cos_beta,X,masked\n")
        for r, th, phi2, sb, cb, X, masked in rows:
            fh.write(f"{r!r},{th!r},{phi2!r},{sb!r},{cb!r},{X!r},"
                     f"{'true' if masked else 'false'}\n")
    print(f"wrote {len(rows)} rows to {out_path}", file=sys.stderr)
    return 0


def cmd_ode(cfg: RunConfig):
    spec = cfg.spec()
    if cfg.model != "soler":
        print("error: the radial system belongs to the scalar model; "
              "run with --model soler", file=sys.stderr)
        return 2
    rtol = cfg.tolerances.get("rtol", 1e-9)
    atol = cfg.tolerances.get("atol", 1e-12)
    grid_cfg = cfg.grid_or(grids.GridConfig(r_min=1.0, r_max=10.0, n_r=200,
                                            n_theta=2))
    try:
        summary, traj = verify.ode_summary(
            spec, r_span=(grid_cfg.r_min, grid_cfg.r_max), rtol=rtol,
            atol=atol, scan=cfg.scan_el,
        )
    except (DivergingState, StepUnderflow, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_path = cfg.out or "trajectory.csv"
    ode.trajectory_to_csv(traj, spec, out_path)
    doc = {"schema": SCHEMA, "model": "soler", "mass": spec.m,
           "trajectory_csv": out_path, **summary}
    _emit_json(doc, None)
    return 0


def cmd_locus(cfg: RunConfig):
    spec = cfg.spec()
    model = cfg.model if cfg.model != "p" else cfg.p
    doc = {"schema": SCHEMA, **singular.singularity_report(spec, model)}
    _emit_json(doc, cfg.out)
    return 0


def cmd_report(cfg: RunConfig):
    spec = cfg.spec()
    model = cfg.model if cfg.model != "p" else cfg.p
    doc = {
        "schema": SCHEMA,
        "verify": verify.run_suites(
            spec, cfg.model_name, grid_cfg=cfg.grid_or(grids.GridConfig()),
            seed=cfg.seed, tolerances=cfg.tolerances, margin=cfg.mask_margin,
        ),
        "singularity": singular.singularity_report(spec, model),
    }
    if cfg.model == "soler":
        summary, _ = verify.ode_summary(spec, scan=cfg.scan_el)
        doc["ode"] = summary
    _emit_json(doc, cfg.out)
    return 0 if doc["verify"]["pass"] else 1


COMMANDS = {
    "verify": cmd_verify,
    "fieldmap": cmd_fieldmap,
    "ode": cmd_ode,
    "locus": cmd_locus,
    "report": cmd_report,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (argparse.ArgumentTypeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return COMMANDS[args.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
