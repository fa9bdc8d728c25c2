"""Scenario-driven experiment runner.

A scenario is a small TOML file; every run writes JSON reports and CSV
tables into an output directory together with ``run.json``, a record of
stage status, timing and artifacts.  Numeric artifacts depend only on the
scenario and the seed, so reruns reproduce them byte for byte.
"""

from __future__ import annotations

import copy
import csv
import hashlib
import io
import json
import os
import re
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import click
import jsonschema
import numpy as np
import tomli

from . import contact, flow, kam, linking, morse, openbook

__all__ = [
    "ScenarioError",
    "StageError",
    "Scenario",
    "RunRecord",
    "load_scenario",
    "parse_scenario",
    "run",
    "export_figure_data",
    "validate_artifact",
    "FIGURES",
    "STAGES",
    "main",
]

SCHEMA_VERSION = 1
STAGES = ("build", "flow", "certify", "kam", "morse", "appc")
DEFAULTS = {
    "n": 1,
    "regime": "thm1",
    "stages": list(STAGES),
    "seed": 0,
    "chart": {"T": -2 * np.pi, "a": float(np.sqrt(2.0)), "r_inner": 0.25, "grid_size": 10_000},
    "integrator": {"rtol": 1e-9, "atol": 1e-10, "samples": 100},
    "perturbation": {"kam_deltas": [1e-5, 1e-4, 1e-3], "appc_delta": 1e-4, "modes": 3},
    "kam": {
        "targets": [1.0 - np.sqrt(2.0) / 2],
        "alpha": 0.2,
        "beta": 2.0,
        "K": 10_000,
        "modes": 64,
        "tol": 1e-10,
        "g_amplitude": 0.05,
        "threshold": 1e-3,
    },
    "morse": {"C": np.pi**2 / 4, "epsilon_trim": np.pi**2 / 40},
    "appc": {"probes": 1000, "probe_radius": 0.05},
}


class ScenarioError(ValueError):
    """Scenario file that does not parse or validate."""


class StageError(RuntimeError):
    """A stage raised; the message carries the module error."""


def _schema(name: str) -> dict:
    text = resources.files("reebgss").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate_artifact(obj: dict, name: str) -> None:
    """Validate a JSON artifact against its shipped schema."""
    jsonschema.validate(obj, _schema(name))


def _locate(text: str, path) -> tuple[int, int]:
    """Line and column of the key at ``path`` in TOML text, (1, 1) if not found."""
    keys = [p for p in path if isinstance(p, str)]
    if not keys:
        return 1, 1
    want, key = ".".join(keys[:-1]), keys[-1]
    section = ""
    for i, line in enumerate(text.splitlines()):
        s = line.strip()
        m = re.match(r"^\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip()
            if len(keys) == 1 and section == key:
                return i + 1, line.index("[") + 1
        elif section == want and re.match(rf"^{re.escape(key)}\s*=", s):
            return i + 1, line.index(key) + 1
    return 1, 1


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k].update(v)
        else:
            out[k] = v
    return out


@dataclass
class Scenario:
    """Resolved scenario: user values over defaults."""

    data: dict
    source: str = "<string>"

    @property
    def n(self) -> int:
        return self.data["n"]

    @property
    def regime(self) -> str:
        return self.data["regime"]

    @property
    def seed(self) -> int:
        return self.data["seed"]

    @property
    def stages(self) -> list:
        return [s for s in STAGES if s in self.data["stages"]]

    def section(self, name: str) -> dict:
        return self.data[name]

    def digest(self) -> str:
        """sha256 of the canonical JSON of the resolved scenario without seed and output."""
        body = {k: v for k, v in self.data.items() if k not in ("seed", "output", "stages")}
        blob = json.dumps(body, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    """Parse and validate scenario text.

    Raises
    ------
    ScenarioError
        With ``source:line:column`` for syntax and validation failures.
    """
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"line (\d+), column (\d+)", str(exc))
        where = f"{m.group(1)}:{m.group(2)}" if m else "?:?"
        raise ScenarioError(f"{source}:{where}: {exc}") from exc
    if "schema_version" not in raw:
        raise ScenarioError(f"{source}:1:1: missing mandatory key 'schema_version'")
    validator = jsonschema.Draft202012Validator(_schema("scenario"))
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        line, col = _locate(text, list(e.absolute_path))
        where = ".".join(str(p) for p in e.absolute_path) or "<root>"
        raise ScenarioError(f"{source}:{line}:{col}: {where}: {e.message}")
    deltas = raw.get("perturbation", {}).get("kam_deltas")
    if deltas is not None and list(deltas) != sorted(deltas):
        line, col = _locate(text, ["perturbation", "kam_deltas"])
        raise ScenarioError(f"{source}:{line}:{col}: perturbation.kam_deltas must be ascending")
    return Scenario(_merge(DEFAULTS, raw), source)


def load_scenario(path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(), str(path))


def _plain(x):
    """Convert numpy scalars and arrays for JSON output."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    return x


def _dump(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    path.write_text(buf.getvalue())


class _Out:
    """Artifact writer scoped to one stage."""

    def __init__(self, root: Path):
        self.root = root
        self.written: list = []

    def json(self, name: str, obj: dict, schema: str) -> None:
        obj = dict(obj, schema_version=SCHEMA_VERSION)
        obj = _plain(obj)
        validate_artifact(obj, schema)
        (self.root / name).write_text(_dump(obj))
        self.written.append(name)

    def csv(self, name: str, header, rows) -> None:
        _write_csv(self.root / name, header, rows)
        self.written.append(name)

    def text(self, name: str, body: str) -> None:
        (self.root / name).write_text(body)
        self.written.append(name)


def _chart(sc: Scenario):
    c = sc.section("chart")
    return contact.build_profile(c["T"], c["a"], c["r_inner"], c["grid_size"])


def _stage_build(sc: Scenario, out: _Out, seed: int, transcript: bool) -> None:
    chain = openbook.example_chain(sc.n, sc.regime)
    dec = openbook.decompose(chain, sc.regime)
    out.json("chain.json", {
        "n": sc.n,
        "regime": sc.regime,
        "books": [b.page.kind for b in chain.books],
        "joins": [list(j) for j in chain.joins],
        "blocks": dec.labels,
        "zero_matrix": dec.zero_matrix.astype(int),
        "handle_blocks": [dec.labels[i] for i in dec.handle_blocks],
        "counted_handles": [f"h{j}" for j in dec.counted_handles],
    }, "chain")
    ch = _chart(sc)
    c = sc.section("chart")
    r = np.arange(1, c["grid_size"] + 1) / c["grid_size"]
    m = contact.contact_margin(ch, r)
    inner = r <= ch.r_inner
    outer = r >= 0.5
    e_in = float(np.max(np.abs(m[inner] - 4 * r[inner]))) if inner.any() else 0.0
    e_out = float(np.max(np.abs(m[outer] + ch.T / (2 * np.pi) * np.exp(0.5 - r[outer]))))
    probe = np.linspace(0.01, 0.99, 99)
    res = np.concatenate(contact.reeb_identities(ch, probe))
    out.json("contact.json", {
        "T": ch.T, "a": ch.a, "r_inner": ch.r_inner, "grid_size": c["grid_size"],
        "margin": float(np.min(m)), "valid": bool(np.min(m) > 0),
        "inner_error": e_in, "outer_error": e_out,
        "identity_residual": float(np.max(np.abs(res))),
    }, "contact")


def _stage_flow(sc: Scenario, out: _Out, seed: int, transcript: bool) -> None:
    it = sc.section("integrator")
    book = openbook.make_annulus_book()
    fld = flow.mapping_torus_field(book)
    sec = flow.Section(2, 0.3)
    rows = []
    err = terr = 0.0
    for x in np.linspace(-1.0, 1.0, it["samples"]):
        y, t = flow.return_map(fld, sec, [x, 0.7, 0.3], it["rtol"], it["atol"], np.pi)
        expect = (0.7 + openbook.dehn_sigma(x)) % (2 * np.pi)
        e = abs((y[1] - expect + np.pi) % (2 * np.pi) - np.pi)
        te = abs(t - abs(openbook.dehn_shift(x)))
        err, terr = max(err, e), max(terr, te)
        rows.append((x, y[1], expect, t, e))
    out.csv("flow_return_map.csv", ["x", "phi_return", "phi_expected", "return_time", "error"], rows)
    traj = flow.integrate(fld, [0.5, 0.0, 0.0], 4 * np.pi, it["rtol"], it["atol"])
    ts = np.linspace(0.0, 4 * np.pi, 201)
    pts = traj(ts)
    out.csv("flow_trajectory.csv", ["t", "chart", "x", "phi", "theta"],
            [(t, traj.chart, *p) for t, p in zip(ts, pts)])
    out.json("flow.json", {
        "samples": it["samples"], "section_theta": 0.3, "rtol": it["rtol"], "atol": it["atol"],
        "max_error": err, "max_time_error": terr,
    }, "flow")


def _stage_certify(sc: Scenario, out: _Out, seed: int, transcript: bool) -> None:
    dec = openbook.decompose(openbook.example_chain(sc.n, sc.regime), sc.regime)
    cert = linking.certify_lower_bound(dec)
    replay = linking.replay_certificate(cert, dec)
    try:
        brute = linking.brute_force_bound(dec)
    except ValueError:
        brute = None
    if brute is not None and brute != cert.bound:
        raise StageError(f"certified bound {cert.bound} disagrees with exhaustive bound {brute}")
    body = cert.to_dict()
    body.update(replay=replay, brute_force=brute)
    out.json("certificate.json", body, "certificate")
    if transcript:
        out.text("transcript.txt", linking.certificate_transcript(cert))


def _stage_kam(sc: Scenario, out: _Out, seed: int, transcript: bool) -> None:
    k = sc.section("kam")
    p = sc.section("perturbation")
    a = sc.section("chart")["a"]
    deg = kam.nondegeneracy(kam.ModifiedHamiltonian(a, None))
    nd = kam.nondegeneracy(kam.ModifiedHamiltonian(a, kam.default_g(k["g_amplitude"])))
    slope = kam.diophantine(a, k["alpha"], k["beta"], k["K"])
    circles, rows, rot = [], [], []
    decreasing = True
    xs = 2 * np.pi * np.arange(64) / 64
    for target in k["targets"]:
        kappa = 2 * np.pi * target
        norms = []
        for delta in [0.0] + list(p["kam_deltas"]):
            tm = kam.TwistMap(delta=delta, seed=seed, modes=p["modes"])
            c = kam.find_invariant_circle(tm, kappa, k["tol"], k["modes"], k["alpha"], k["beta"], k["K"])
            set_err = kam.circle_set_error(tm, c) if delta else 0.0
            circles.append({
                "target": target, "kappa": kappa, "delta": delta, "r0": c.r0,
                "residual": c.residual, "norm_g1": c.norm_g1, "norm_g2": c.norm_g2,
                "translation": c.translation, "n_modes": c.n_modes, "set_error": set_err,
            })
            norms.append(c.norm_g1 + c.norm_g2)
            r, th = c.evaluate(xs)
            rows += [(target, delta, x, ri, ti) for x, ri, ti in zip(xs, r, th)]
        decreasing &= bool(np.all(np.diff(norms) > 0))
    tm0 = kam.TwistMap()
    for r0 in (-1.0, -0.5, 0.0, 0.5, 1.0):
        est = kam.rotation_number(tm0, r0)
        rot.append({"r0": r0, "value": est.value, "expected": (1.0 - r0) / 2})
    out.json("kam.json", {
        "seed": seed,
        "nondegeneracy": {
            "degenerate_min_abs_det": deg.min_abs_det, "min_abs_det": nd.min_abs_det,
            "threshold": k["threshold"], "passed": nd.min_abs_det > k["threshold"],
            "g_amplitude": k["g_amplitude"], "argmin": list(nd.argmin),
        },
        "slope": {"value": a, "passed": slope.passed, "worst": list(slope.worst),
                  "ratio": slope.worst_ratio},
        "circles": circles, "norms_decreasing": decreasing, "rotation": rot,
    }, "kam")
    out.csv("kam_curves.csv", ["target", "delta", "x", "r", "theta"], rows)


def _morse_model(sc: Scenario):
    m = sc.section("morse")
    return morse.make_model(m["C"], m["epsilon_trim"])


def _stage_morse(sc: Scenario, out: _Out, seed: int, transcript: bool) -> None:
    model = _morse_model(sc)
    rep = morse.verify_properties(model)
    out.json("morse.json", rep, "morse")
    rot = rep["rotation"]
    out.csv("morse_rotation.csv", ["r", "rotation", "expected"],
            [(r, v, (1 - r) / 2) for r, v in zip(rot["radii"], rot["rotation"])])


def _stage_appc(sc: Scenario, out: _Out, seed: int, transcript: bool) -> None:
    ch = _chart(sc)
    p = sc.section("perturbation")
    ap = sc.section("appc")
    h = flow.trig_perturbation(seed)
    delta = p["appc_delta"]
    orb = flow.continue_binding_orbit(ch, h, delta)
    half = flow.continue_binding_orbit(ch, h, delta / 2)
    d1, d2 = flow.orbit_displacement(orb), flow.orbit_displacement(half)
    tr = flow.transversality_margin(ch, delta, ap["probe_radius"], ap["probes"], h, seed, orb)
    q = flow.normal_quadratic_form(ch, 0.0)
    ts = np.linspace(0.0, orb.period, 129)
    pts = orb.trajectory(ts)
    out.csv("appc_orbit.csv", ["t", "chart", "x", "y", "angle"],
            [(t, "binding", *pt) for t, pt in zip(ts, pts)])
    out.json("appc.json", {
        "seed": seed, "delta": delta, "displacement": d1, "half_displacement": d2,
        "ratio": d2 / d1 if d1 else 0.0, "residual": orb.residual,
        "multipliers": [[complex(z).real, complex(z).imag] for z in orb.multipliers],
        "transversality": {"margin": tr.margin, "success": tr.success, "n_probes": tr.n_probes,
                           "probe_radius": tr.probe_radius, "excluded": tr.excluded},
        "quadratic_form": q, "quadratic_form_error": float(np.max(np.abs(q - ch.a * np.eye(2)))),
    }, "appc")


STAGE_FUNCS = {
    "build": _stage_build,
    "flow": _stage_flow,
    "certify": _stage_certify,
    "kam": _stage_kam,
    "morse": _stage_morse,
    "appc": _stage_appc,
}


@dataclass
class RunRecord:
    """Stage status, wall-clock and artifacts of a run directory."""

    scenario_hash: str
    seed: int
    n: int
    regime: str
    stages: list = field(default_factory=list)

    @property
    def artifacts(self) -> list:
        return sorted({a for s in self.stages for a in s["artifacts"]})

    def status(self, stage: str) -> str | None:
        for s in self.stages:
            if s["name"] == stage:
                return s["status"]
        return None

    @property
    def ok(self) -> bool:
        return all(s["status"] == "ok" for s in self.stages)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION, "scenario_hash": self.scenario_hash,
            "seed": self.seed, "n": self.n, "regime": self.regime,
            "stages": self.stages, "artifacts": self.artifacts,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(d["scenario_hash"], d["seed"], d["n"], d["regime"], list(d["stages"]))

    def put(self, entry: dict) -> None:
        self.stages = [s for s in self.stages if s["name"] != entry["name"]] + [entry]
        self.stages.sort(key=lambda s: STAGES.index(s["name"]))


class _Lock:
    def __init__(self, root: Path):
        self.path = root / ".lock"

    def __enter__(self):
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise StageError(f"output directory is locked by another run ({self.path})") from None
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        return self

    def __exit__(self, *exc):
        self.path.unlink(missing_ok=True)


def run(
    scenario: Scenario | str | os.PathLike,
    out: str | os.PathLike | None = None,
    seed: int | None = None,
    stages=None,
    transcript: bool = False,
    echo=None,
) -> RunRecord:
    """Run the scenario's stages (or ``stages``) in dependency order.

    Artifacts of earlier stages stay on disk when a later stage fails; the
    failure is recorded in ``run.json`` and re-raised as StageError.
    """
    sc = scenario if isinstance(scenario, Scenario) else load_scenario(scenario)
    seed = sc.seed if seed is None else int(seed)
    if not 0 <= seed < 2**64:
        raise ScenarioError("seed must be an unsigned 64-bit integer")
    root = Path(out if out is not None else sc.data.get("output", "reebgss-out"))
    root.mkdir(parents=True, exist_ok=True)
    wanted = sc.stages if stages is None else [s for s in STAGES if s in stages]
    digest = sc.digest()
    with _Lock(root):
        rec_path = root / "run.json"
        rec = RunRecord(digest, seed, sc.n, sc.regime)
        if rec_path.exists():
            old = json.loads(rec_path.read_text())
            if old.get("scenario_hash") == digest and old.get("seed") == seed:
                rec = RunRecord.from_dict(old)
        resolved = {k: v for k, v in sc.data.items() if k != "output"}
        validate_artifact(_plain(resolved), "scenario")
        (root / "scenario.json").write_text(_dump(resolved))
        for name in wanted:
            w = _Out(root)
            t0 = time.perf_counter()
            try:
                STAGE_FUNCS[name](sc, w, seed, transcript)
            except Exception as exc:  # noqa: BLE001 - recorded, then re-raised
                rec.put({"name": name, "status": "failed", "seconds": time.perf_counter() - t0,
                         "artifacts": w.written, "error": f"{type(exc).__name__}: {exc}"})
                _save_record(rec, rec_path)
                raise StageError(f"stage {name} failed: {type(exc).__name__}: {exc}") from exc
            rec.put({"name": name, "status": "ok", "seconds": time.perf_counter() - t0,
                     "artifacts": w.written, "error": None})
            if echo is not None:
                echo(f"{name}: ok ({', '.join(w.written)})")
        _save_record(rec, rec_path)
    return rec


def _save_record(rec: RunRecord, path: Path) -> None:
    d = rec.to_dict()
    validate_artifact(d, "run_record")
    path.write_text(_dump(d))


def _need(root: Path, stage: str) -> dict:
    p = root / "run.json"
    if not p.exists():
        raise StageError(f"no run record in {root}")
    rec = RunRecord.from_dict(json.loads(p.read_text()))
    if rec.status(stage) != "ok":
        raise StageError(f"figure needs a successful '{stage}' stage in {root}")
    return json.loads(p.read_text())


def _fig_f1f2(root: Path, sc: Scenario) -> list:
    _need(root, "build")
    ch = _chart(sc)
    r = np.linspace(0.0, 1.0, 1001)
    _write_csv(root / "fig_f1f2.csv", ["r", "f1", "f2"], zip(r, ch.f1(r), ch.f2(r)))
    return ["fig_f1f2.csv"]


def _fig_levels(root: Path, sc: Scenario) -> list:
    _need(root, "morse")
    model = _morse_model(sc)
    levels = model.C + np.array([-2.0, -1.0, -0.5, 0.0, 0.5, 1.0]) * model.epsilon_trim
    levels = np.append(levels, model.C + model.epsilon_trim)
    rows = []
    for lv in np.unique(levels):
        for i, line in enumerate(morse.level_polylines(model, lv, 601)):
            rows += [(lv, i, r, th) for r, th in line]
    _write_csv(root / "fig_morse_levels.csv", ["level", "curve", "r", "theta"], rows)
    return ["fig_morse_levels.csv"]


def _fig_blocks(regime):
    def make(root: Path, sc: Scenario) -> list:
        _need(root, "build")
        dec = openbook.decompose(openbook.example_chain(sc.n, regime), regime)
        handles = {b: j for j, b in enumerate(dec.handle_blocks)}
        rows = []
        for i, lab in enumerate(dec.labels):
            zero = ";".join(dec.labels[k] for k in np.flatnonzero(dec.zero_matrix[i]))
            h = handles.get(i)
            rows.append((i, lab, "" if h is None else f"h{h}",
                         int(h in dec.counted_handles) if h is not None else 0, zero))
        name = f"fig_blocks_{regime}.csv"
        _write_csv(root / name, ["index", "block", "handle", "counted", "zero_link_with"], rows)
        return [name]

    return make


FIGURES = {
    "f1f2": _fig_f1f2,
    "morse-levels": _fig_levels,
    "blocks": _fig_blocks("thm1"),
    "blocks-thm2": _fig_blocks("thm2"),
}


def export_figure_data(run_dir, figure: str, scenario: Scenario | None = None) -> list:
    """Write the CSV data behind a figure into the run directory.

    Columns: ``f1f2`` r, f1, f2; ``morse-levels`` level, curve, r, theta;
    ``blocks`` and ``blocks-thm2`` index, block, handle, counted,
    zero_link_with.

    Raises
    ------
    KeyError
        For an unknown figure id.
    StageError
        When the run lacks the stage the figure is built from.
    """
    if figure not in FIGURES:
        raise KeyError(f"unknown figure id {figure!r}; choose from {', '.join(FIGURES)}")
    root = Path(run_dir)
    if scenario is None:
        p = root / "scenario.json"
        if not p.exists():
            raise StageError(f"no scenario.json in {root}")
        scenario = Scenario(json.loads(p.read_text()), str(p))
    return FIGURES[figure](root, scenario)


def _options(f):
    f = click.option("--transcript", is_flag=True, help="Write a plain-text proof transcript.")(f)
    f = click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None,
                     help="Override the scenario seed.")(f)
    f = click.option("--out", "out", type=click.Path(file_okay=False), default=None,
                     help="Output directory.")(f)
    f = click.option("--scenario", "scenario", type=click.Path(exists=True, dir_okay=False),
                     default=None, help="Scenario TOML file.")(f)
    return f


def _scenario_or_default(path) -> Scenario:
    if path is None:
        return parse_scenario(f"schema_version = {SCHEMA_VERSION}\n", "<defaults>")
    return load_scenario(path)


def _invoke(stages, scenario, out, seed, transcript):
    try:
        sc = _scenario_or_default(scenario)
        rec = run(sc, out, seed, stages, transcript, echo=click.echo)
    except (ScenarioError, StageError) as exc:
        raise click.ClickException(str(exc)) from exc
    tfile = Path(out or sc.data.get("output", "reebgss-out")) / "transcript.txt"
    if transcript and tfile.exists():
        click.echo(tfile.read_text(), nl=False)
    click.echo(f"scenario {rec.scenario_hash[:12]} seed {rec.seed}: "
               + ", ".join(f"{s['name']}={s['status']}" for s in rec.stages))


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Reeb flows on contact open books: build, simulate, certify."""


def _verb(name):
    @_options
    def cmd(scenario, out, seed, transcript):
        _invoke([name], scenario, out, seed, transcript)

    cmd.__doc__ = f"Run the {name} stage."
    return main.command(name)(cmd)


for _name in STAGES:
    _verb(_name)


@main.command("all")
@_options
def all_cmd(scenario, out, seed, transcript):
    """Run every stage listed in the scenario."""
    _invoke(None, scenario, out, seed, transcript)


@main.command("export")
@click.argument("figure")
@click.option("--scenario", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Scenario TOML file (default: the run's scenario.json).")
@click.option("--out", "out", type=click.Path(file_okay=False), default=None,
              help="Run directory holding run.json.")
def export_cmd(figure, scenario, out):
    """Export CSV data for FIGURE (f1f2, morse-levels, blocks, blocks-thm2)."""
    try:
        sc = load_scenario(scenario) if scenario is not None else None
        default = sc.data.get("output", "reebgss-out") if sc is not None else "reebgss-out"
        root = Path(out or default)
        names = export_figure_data(root, figure, sc)
    except KeyError as exc:
        raise click.BadParameter(str(exc.args[0]), param_hint="FIGURE") from exc
    except (ScenarioError, StageError) as exc:
        raise click.ClickException(str(exc)) from exc
    for n in names:
        click.echo(str(root / n))


if __name__ == "__main__":
    main()
