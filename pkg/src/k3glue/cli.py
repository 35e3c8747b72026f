"""Command-line surface: `k3glue <command> --config <path> --seed <n> --out <dir>`.

Each subcommand validates a JSON scenario config against the shipped
schemas, dispatches to the library, and writes a canonical report
(report.json plus per-section CSVs) into the output directory.  Reports
are byte-identical for identical (config, seed) pairs: the canonical
files carry no timestamps; wall time goes to stderr in verbose mode.

Exit codes: 0 all verdicts pass, 1 some verdict fails, 2 config error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import cover, family, lattice, linearize, surgery, torus
from .errors import K3GlueError, SchemaError

COMMANDS = ("dioph", "ueda", "linearize", "glue", "ks", "lattice", "full-report")
SECTION_ORDER = ("dioph", "ueda", "linearize", "glue", "ks", "lattice")


def _load_schema(name: str) -> dict:
    with resources.files("k3glue.schemas").joinpath(name).open() as fh:
        return json.load(fh)


def _fill_defaults(obj: dict, schema: dict) -> dict:
    out = dict(obj)
    for key, sub in schema.get("properties", {}).items():
        if key not in out and "default" in sub:
            out[key] = sub["default"]
    return out


@dataclass
class ScenarioConfig:
    command: str
    parameters: dict
    seed: int
    output_path: str

    def canonical(self) -> str:
        return json.dumps(
            {
                "command": self.command,
                "parameters": self.parameters,
                "seed": self.seed,
            },
            sort_keys=True,
        )

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def parse_config(source: str) -> ScenarioConfig:
    """Validate a scenario config from a file path or inline JSON text."""
    path = Path(source)
    try:
        is_file = path.exists()
    except OSError:  # inline JSON long enough to overflow a path name
        is_file = False
    try:
        text = path.read_text() if is_file else source
        raw = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError([f"config is not readable JSON: {exc}"])

    import jsonschema

    schema = _load_schema("scenario.json")
    validator = jsonschema.Draft202012Validator(schema)
    violations = [
        f"{'.'.join(str(p) for p in err.absolute_path) or '<root>'}: {err.message}"
        for err in sorted(validator.iter_errors(raw), key=str)
    ]
    if violations:
        raise SchemaError(violations)
    raw = _fill_defaults(raw, schema)

    params_schema = _load_schema("parameters.json")["$defs"]
    cmd = raw["command"]
    sub = params_schema[cmd]
    params = raw.get("parameters", {})
    resolver_schema = {"$defs": params_schema, **sub}
    validator = jsonschema.Draft202012Validator(resolver_schema)
    violations = [
        f"parameters.{'.'.join(str(p) for p in err.absolute_path) or '<root>'}: {err.message}"
        for err in sorted(validator.iter_errors(params), key=str)
    ]
    if violations:
        raise SchemaError(violations)
    params = _fill_defaults(params, sub)
    if cmd == "full-report":
        for section in SECTION_ORDER:
            params[section] = _fill_defaults(params.get(section, {}), params_schema[section])
    return ScenarioConfig(
        command=cmd,
        parameters=params,
        seed=raw["seed"],
        output_path=raw["output_path"],
    )


@dataclass
class RunReport:
    command: str
    config_hash: str
    verdicts: dict = field(default_factory=dict)
    messages: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    wall_time: float = 0.0  # stderr-only; kept out of the canonical files

    @property
    def passed(self) -> bool:
        return all(v != "fail" for v in self.verdicts.values())

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "verdicts": dict(sorted(self.verdicts.items())),
            "messages": dict(sorted(self.messages.items())),
        }

    def write(self, out_dir: Path) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "report.json", "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, indent=2)
            fh.write("\n")
        for name, (header, rows) in sorted(self.tables.items()):
            with open(out_dir / f"{name}.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                for row in rows:
                    w.writerow(row)


def _bundle_from_param(value) -> torus.FlatBundleClass:
    if value == "golden":
        return torus.golden_class
    if value == "liouville":
        return torus.liouville_class
    if value == "trivial":
        return torus.TRIVIAL
    return torus.FlatBundleClass.from_json(value)


# ---------------------------------------------------------------------------
# sections
# ---------------------------------------------------------------------------

def _run_dioph(params: dict, seed: int, report: RunReport) -> None:
    L = _bundle_from_param(params["bundle"])
    rep = torus.diophantine_estimate(
        L, params["n_max"], params["exponent_cap"], offset_cap=params["offset_cap"]
    )
    ok = rep.passes == params["expect_pass"]
    report.verdicts["dioph"] = "pass" if ok else "fail"
    report.messages["dioph"] = (
        f"fitted exponent {rep.fitted_exponent:.4f}, offset {rep.fitted_offset:.4f}, "
        f"passes={rep.passes}, worst_n={rep.worst_n}"
    )
    report.tables["dioph_samples"] = (
        ["n", "d_n", "neg_log_d_n"],
        [
            [n, float(d), -(math.log(d.numerator) - math.log(d.denominator))
             if isinstance(d, Fraction) else -math.log(d)]
            for n, d in rep.samples
        ],
    )


def _run_ueda(params: dict, seed: int, report: RunReport) -> None:
    rng = np.random.default_rng(seed)
    rows = []
    all_hold = True
    trial = 0
    for n_charts in params["chart_counts"]:
        atlas = cover.build_cover(torus.TorusShape(1j), n_charts)
        consts = cover.atlas_ueda_constants(atlas)
        for _ in range(params["classes_per_count"]):
            cls = torus.FlatBundleClass(rng.random(), rng.random())
            E = cover.restriction_cocycle(cls, atlas)
            d = cover.cocycle_distance(E, restarts=3)
            for _ in range(max(1, params["trials"] // params["classes_per_count"])):
                f = cover.random_cochain(atlas, rng, degree=params["degree"])
                nf = f.norm()
                ndf = cover.delta(f, E).norm()
                slack = float(consts.K) * ndf - d * nf
                all_hold &= slack >= 0
                rows.append([trial, nf, ndf, d, float(consts.K), slack])
                trial += 1
    report.verdicts["ueda"] = "pass" if all_hold else "fail"
    report.messages["ueda"] = f"{trial} trials, inequality holds in all: {all_hold}"
    report.tables["ueda_trials"] = (
        ["trial", "norm_f", "norm_delta_f", "d", "K", "slack"], rows
    )


def _run_linearize(params: dict, seed: int, report: RunReport) -> None:
    rng = np.random.default_rng(seed)
    order = params["order"]
    atlas = cover.build_cover(torus.TorusShape(0.5j), params["n_charts"])
    graph = linearize.linearizer_graph(atlas)
    L = torus.golden_class
    phis = []
    alpha1 = linearize.bundle_class(L, 1)[0]
    from .modes import QPSeries, VSeries

    for _ in range(atlas.n_charts):
        vs = VSeries(order)
        vs.set_coeff(
            2,
            QPSeries(
                alpha1,
                {
                    m: params["epsilon"] * (rng.standard_normal() + 1j * rng.standard_normal())
                    for m in (-1, 0, 1)
                },
            ),
        )
        phis.append(vs)
    data = linearize.synthetic_schroder(graph, L, phis, order)
    res = linearize.schroder_solve(data, order)
    subs = linearize.schroder_residuals(data, res.f, order)
    worst = max(subs.values())
    ok = worst < params["residual_tol"]

    K = float(cover.atlas_ueda_constants(atlas).K)
    inner = [
        atlas.centers[j]
        + atlas.inner_radius * 0.999 * np.exp(2j * np.pi * np.arange(128) / 128)
        for j in range(atlas.n_charts)
    ]
    Q = 2.0 / 1.25
    sup_p = max(
        c.sup(inner[key[0]] - atlas.centers[key[0]])
        for key, vs in data.p.items()
        for c in vs.terms.values()
    )
    M = 2.0 * max(Q, sup_p)
    div = [float(d) for d in linearize.distance_divisors(L, order)]
    A = linearize.majorant_schroder(K, M, div, order=order)
    dominated = True
    rows = []
    for n in range(2, order + 1):
        sup_f = max(
            (res.f[j].coeff(n).sup(inner[j] - atlas.centers[j])
             for j in range(atlas.n_charts) if res.f[j].coeff(n) is not None),
            default=0.0,
        )
        dominated &= sup_f <= float(A.coefficients[n])
        rows.append([n, div[n - 1], sup_f, float(A.coefficients[n])])
    report.verdicts["linearize"] = "pass" if ok and dominated else "fail"
    report.messages["linearize"] = (
        f"substitution residual {worst:.2e} (tol {params['residual_tol']:.0e}), "
        f"majorant domination: {dominated}"
    )
    report.tables["linearize_majorant"] = (["order", "d_prev", "sup_f", "A_nu"], rows)


def _run_glue(params: dict, seed: int, report: RunReport) -> None:
    L = _bundle_from_param(params["bundle"])
    atlas = cover.build_cover(torus.TorusShape(1j), params["n_charts"])
    datum = surgery.GluingDatum(
        atlas=atlas, bundle=L, R=params["R"], R_prime=params["R_prime"], g_shift=0.1
    )
    rep1 = surgery.check_transitions(datum)
    rep2 = surgery.pullback_two_form_check(datum)
    dim0 = surgery.global_function_dim(datum, laurent_cap=params["laurent_cap"])
    basis = surgery.global_vector_field_basis(datum, laurent_cap=params["laurent_cap"])
    level = surgery.LeviFlatLevel(r=min(params["R"], 1.2), datum=datum)
    dens = surgery.leaf_density(level, n_iter=params["density_iterations"],
                                epsilon=params["epsilon"])
    vol = surgery.volume_bound(datum, math.e, 1.0)
    ok = (
        rep1.all_passed
        and rep2.all_passed
        and dim0 == 1
        and basis.dimension == 2
        and dens.achieved
        and vol.rel_error < 1e-6
    )
    report.verdicts["glue"] = "pass" if ok else "fail"
    report.messages["glue"] = (
        f"transitions={rep1.all_passed}, two_form={rep2.all_passed}, "
        f"H0_dim={dim0}, vf_dim={basis.dimension}, density_n={dens.n_needed}, "
        f"volume_rel_err={vol.rel_error:.2e}"
    )
    report.tables["glue_density"] = (
        ["N", "discrepancy"], [[n, d] for n, d in dens.discrepancy]
    )
    vol_rows = []
    for r, rp in ((1.0, 1.0), (1.5, 1.2), (math.e, 1.0), (2.0, 2.0)):
        v = surgery.volume_bound(datum, r, rp)
        vol_rows.append([r, rp, v.volume, v.quadrature, v.rel_error])
    report.tables["glue_volume"] = (
        ["r", "r_prime", "closed_form", "quadrature", "rel_error"], vol_rows
    )


def _run_ks(params: dict, seed: int, report: RunReport) -> None:
    rng = np.random.default_rng(seed)
    atlas = cover.build_cover(torus.TorusShape(1j), 4)
    datum = surgery.GluingDatum(atlas=atlas, bundle=torus.golden_class, R=2.0,
                                R_prime=2.0, g_shift=0.05)
    config = family.FamilyConfig(kind="combined", base_datum=datum, t1=1.5, t2=0.0)
    rows = []
    ok = True
    import sympy

    for i in range(params["n_parameter_points"]):
        t0 = 0j
        while not 1.0 < abs(t0) < datum.R_prime:
            t0 = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        rep = family.ks_cocycle_w(config, t0=t0, h=params["step"])
        sym_ok = sympy.simplify(rep.symbolic_coefficient - 1 / sympy.Symbol("t0")) == 0
        ok &= sym_ok and rep.observed_order >= 1.9
        rows.append([i, t0.real, t0.imag, rep.observed_order])
    repz = family.ks_cocycle_z(config)
    ok &= repz.symbolic_coefficient == 1
    dims = family.tangent_cohomology_dims(params["n_points_blowup"])
    ok &= dims == (0, 2 * params["n_points_blowup"] - 8, 0)
    report.verdicts["ks"] = "pass" if ok else "fail"
    report.messages["ks"] = (
        f"theta1 coefficient t0^-1 at {params['n_parameter_points']} points, "
        f"theta2 coefficient 1, dims={dims}"
    )
    report.tables["ks_orders"] = (["trial", "re_t0", "im_t0", "observed_order"], rows)


def _run_lattice(params: dict, seed: int, report: RunReport) -> None:
    import random as _random

    rnd = _random.Random(seed)
    form = lattice.gram_matrix()
    ok = form.signature == (3, 19) and abs(form.determinant) == 1
    rows = []
    for k in params["span_sizes"]:
        vs = []
        while len(vs) < k:
            v = [Fraction(rnd.randrange(-3, 4)) for _ in range(22)]
            if lattice.rational_rank(vs + [v]) == len(vs) + 1:
                vs.append(v)
        V = lattice.Hyperplane(span_vectors=vs, form=form)
        r = lattice.hyperplane_rank(V)
        ok &= r == 22 - k
        if r >= 1:
            wit = lattice.f_n_witness(V, min(3, r))
            ok &= wit.reconstruction_ok
        rows.append([k, r])
    pb = lattice.picard_bound(params["dim_T"])
    ok &= pb.bound == 20 - params["dim_T"]
    report.verdicts["lattice"] = "pass" if ok else "fail"
    report.messages["lattice"] = (
        f"signature={form.signature}, det={form.determinant}, "
        f"picard_bound({params['dim_T']})={pb.bound}, non_kummer={pb.non_kummer_possible}"
    )
    report.tables["lattice_ranks"] = (["span_size", "rank"], rows)


_SECTION_RUNNERS = {
    "dioph": _run_dioph,
    "ueda": _run_ueda,
    "linearize": _run_linearize,
    "glue": _run_glue,
    "ks": _run_ks,
    "lattice": _run_lattice,
}


def run(config: ScenarioConfig) -> RunReport:
    """Dispatch a validated scenario; the report is also written to disk."""
    t0 = time.perf_counter()
    report = RunReport(command=config.command, config_hash=config.config_hash())
    if config.command == "full-report":
        return full_report(config)
    runner = _SECTION_RUNNERS[config.command]
    try:
        runner(config.parameters, config.seed, report)
    except K3GlueError as exc:
        report.verdicts[config.command] = "fail"
        report.messages[config.command] = f"{type(exc).__name__}: {exc}"
    report.wall_time = time.perf_counter() - t0
    report.write(Path(config.output_path))
    return report


def full_report(config: ScenarioConfig) -> RunReport:
    """Run every enabled section in dependency order; one combined report."""
    t0 = time.perf_counter()
    report = RunReport(command="full-report", config_hash=config.config_hash())
    enabled = config.parameters.get("sections", list(SECTION_ORDER))
    for idx, section in enumerate(SECTION_ORDER):
        if section not in enabled:
            report.verdicts[section] = "skipped"
            continue
        params = config.parameters.get(section, {})
        try:
            _SECTION_RUNNERS[section](params, config.seed + idx, report)
        except K3GlueError as exc:
            report.verdicts[section] = "fail"
            report.messages[section] = f"{type(exc).__name__}: {exc}"
    report.wall_time = time.perf_counter() - t0
    report.write(Path(config.output_path))
    return report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="k3glue",
        description="Scenario runner for the K3 gluing-construction model",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", default=None,
                        help="path to a JSON scenario config, or inline JSON")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)

    source = args.config if args.config is not None else json.dumps(
        {"command": args.command}
    )
    try:
        config = parse_config(source)
        if config.command != args.command:
            raise SchemaError(
                [f"command: config says {config.command!r}, CLI says {args.command!r}"]
            )
        if args.seed is not None:
            config.seed = args.seed
        if args.out is not None:
            config.output_path = args.out
    except SchemaError as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return 2

    report = run(config)
    if args.verbose:
        print(f"wall time: {report.wall_time:.2f}s", file=sys.stderr)
        for name, verdict in sorted(report.verdicts.items()):
            print(f"{name}: {verdict}", file=sys.stderr)
    print(f"report written to {config.output_path} "
          f"({'pass' if report.passed else 'FAIL'})")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
