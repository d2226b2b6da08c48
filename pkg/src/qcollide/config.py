"""Run configuration: flat INI-style files, presets, validation.

A config is sections of key = value pairs; the verbatim text is embedded in
every output manifest so a run can be reproduced bit-identically. Presets
are named after the source cases and can be overridden per key from the
command line.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, asdict

from .analysis import PROLIF_MIN_COUNT, PROLIF_WINDOW, QC_THRESHOLD_REL
from .grid import CELL_CENTERED, GridSpec, make_box_grid
from .potentials import FORMS, FORM_AXES
from .units import DEUTERON_MASS, ELECTRON_MASS, derive_system


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass
class RunConfig:
    form: str = "planar_2var"
    axes: list = field(default_factory=lambda: [("R", -15.0, 15.0, 148),
                                                ("x", -15.0, 15.0, 148)])
    policy: str = CELL_CENTERED
    mu: float = ELECTRON_MASS / DEUTERON_MASS
    z: float = 1.0
    k: int = 600
    tol: float = 1e-8
    seed: int = 1234
    solver: str = "auto"  # auto | lanczos | dense | blocked
    softening: float = 0.0
    b_field: tuple = (0.0, 0.0, 0.0)
    qc_threshold_rel: float = QC_THRESHOLD_REL
    prolif_window: float = PROLIF_WINDOW
    prolif_min_count: int = PROLIF_MIN_COUNT
    light_mass: float = ELECTRON_MASS
    heavy_mass: float = DEUTERON_MASS
    dump_states: tuple = ("ground", "first_qc")
    preset: str | None = None
    # quasistatic section
    qs_r_min: float = 0.05
    qs_r_max: float = 20.0
    qs_r_count: int = 40
    qs_beta_count: int = 4
    qs_n_xi: int = 96
    qs_n_eta: int = 40
    # sweep section
    sweep_axis: str | None = None  # mu | box_half_width | basis_size
    sweep_values: list = field(default_factory=list)
    # control section
    ctrl_state_i: int = 0
    ctrl_state_f: int | None = None  # None -> first quasi-collision state
    ctrl_coordinate: str = "R"
    ctrl_omega_count: int = 81
    ctrl_omega_halfwidth: float = 1.0
    ctrl_durations: list = field(default_factory=lambda: [50.0, 100.0, 200.0, 500.0])
    ctrl_e_field: float = 1.0
    ctrl_prefactor: float = 1.0

    def validate(self) -> None:
        if self.form not in FORMS or self.form == "prolate_fixed_R":
            raise ConfigError(f"form must be one of the box forms, got {self.form!r}")
        want = FORM_AXES[self.form]
        names = tuple(a[0] for a in self.axes)
        if names != want:
            raise ConfigError(f"form {self.form!r} needs axes {want}, got {names}")
        if self.k < 1:
            raise ConfigError(f"eigenpair count k must be >= 1, got {self.k}")
        if not 0.0 < self.mu <= 1.0:
            raise ConfigError(f"mass ratio mu must be in (0, 1], got {self.mu}")
        if self.z < 1.0:
            raise ConfigError(f"charge number Z must be >= 1, got {self.z}")
        if self.solver not in ("auto", "lanczos", "dense", "blocked"):
            raise ConfigError(f"unknown solver {self.solver!r}")
        if len(self.b_field) != 3:
            raise ConfigError("b_field needs 3 components (tesla)")
        total = 1
        for _, lo, hi, n in self.axes:
            if not lo < hi or n < 4:
                raise ConfigError(f"bad axis bounds/count: {lo}, {hi}, {n}")
            total *= n
        if self.k >= total and self.solver in ("lanczos",):
            raise ConfigError(f"k={self.k} must be < grid size {total} for lanczos")
        self.k = min(self.k, total)

    def grid(self) -> GridSpec:
        return make_box_grid(self.axes, policy=self.policy)

    def system(self):
        return derive_system(self.light_mass, self.heavy_mass, self.z)

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        cp["run"] = {
            "form": self.form,
            "k": str(self.k),
            "tol": repr(self.tol),
            "seed": str(self.seed),
            "solver": self.solver,
            "preset": self.preset or "",
        }
        cp["grid"] = {
            "axes": ", ".join(f"{n}:{lo!r}:{hi!r}:{c}" for n, lo, hi, c in self.axes),
            "policy": self.policy,
        }
        cp["system"] = {
            "mu": repr(self.mu),
            "z": repr(self.z),
            "light_mass": repr(self.light_mass),
            "heavy_mass": repr(self.heavy_mass),
            "softening": repr(self.softening),
        }
        cp["magnetic"] = {"b_field": ", ".join(repr(b) for b in self.b_field)}
        cp["analysis"] = {
            "qc_threshold_rel": repr(self.qc_threshold_rel),
            "prolif_window": repr(self.prolif_window),
            "prolif_min_count": str(self.prolif_min_count),
            "dump_states": ", ".join(self.dump_states),
        }
        cp["quasistatic"] = {
            "r_min": repr(self.qs_r_min),
            "r_max": repr(self.qs_r_max),
            "r_count": str(self.qs_r_count),
            "beta_count": str(self.qs_beta_count),
            "n_xi": str(self.qs_n_xi),
            "n_eta": str(self.qs_n_eta),
        }
        if self.sweep_axis:
            cp["sweep"] = {
                "axis": self.sweep_axis,
                "values": ", ".join(repr(v) for v in self.sweep_values),
            }
        cp["control"] = {
            "state_i": str(self.ctrl_state_i),
            "state_f": "" if self.ctrl_state_f is None else str(self.ctrl_state_f),
            "coordinate": self.ctrl_coordinate,
            "omega_count": str(self.ctrl_omega_count),
            "omega_halfwidth": repr(self.ctrl_omega_halfwidth),
            "durations": ", ".join(repr(t) for t in self.ctrl_durations),
            "e_field": repr(self.ctrl_e_field),
            "prefactor": repr(self.ctrl_prefactor),
        }
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    def as_dict(self) -> dict:
        d = asdict(self)
        d["axes"] = [list(a) for a in self.axes]
        d["b_field"] = list(self.b_field)
        d["dump_states"] = list(self.dump_states)
        return d


def _parse_axes(text: str) -> list:
    axes = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, lo, hi, n = part.split(":")
        axes.append((name.strip(), float(lo), float(hi), int(n)))
    return axes


def from_ini(text: str) -> RunConfig:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    cfg = RunConfig()
    run = cp["run"] if cp.has_section("run") else {}
    cfg.form = run.get("form", cfg.form)
    cfg.k = int(run.get("k", cfg.k))
    cfg.tol = float(run.get("tol", cfg.tol))
    cfg.seed = int(run.get("seed", cfg.seed))
    cfg.solver = run.get("solver", cfg.solver)
    cfg.preset = run.get("preset") or None
    if cp.has_section("grid"):
        g = cp["grid"]
        if g.get("axes"):
            cfg.axes = _parse_axes(g["axes"])
        cfg.policy = g.get("policy", cfg.policy)
    if cp.has_section("system"):
        s = cp["system"]
        cfg.mu = float(s.get("mu", cfg.mu))
        cfg.z = float(s.get("z", cfg.z))
        cfg.light_mass = float(s.get("light_mass", cfg.light_mass))
        cfg.heavy_mass = float(s.get("heavy_mass", cfg.heavy_mass))
        cfg.softening = float(s.get("softening", cfg.softening))
    if cp.has_section("magnetic"):
        parts = cp["magnetic"].get("b_field", "0, 0, 0").split(",")
        cfg.b_field = tuple(float(p) for p in parts)
    if cp.has_section("analysis"):
        a = cp["analysis"]
        cfg.qc_threshold_rel = float(a.get("qc_threshold_rel", cfg.qc_threshold_rel))
        cfg.prolif_window = float(a.get("prolif_window", cfg.prolif_window))
        cfg.prolif_min_count = int(a.get("prolif_min_count", cfg.prolif_min_count))
        if a.get("dump_states") is not None:
            cfg.dump_states = tuple(
                p.strip() for p in a["dump_states"].split(",") if p.strip()
            )
    if cp.has_section("quasistatic"):
        q = cp["quasistatic"]
        cfg.qs_r_min = float(q.get("r_min", cfg.qs_r_min))
        cfg.qs_r_max = float(q.get("r_max", cfg.qs_r_max))
        cfg.qs_r_count = int(q.get("r_count", cfg.qs_r_count))
        cfg.qs_beta_count = int(q.get("beta_count", cfg.qs_beta_count))
        cfg.qs_n_xi = int(q.get("n_xi", cfg.qs_n_xi))
        cfg.qs_n_eta = int(q.get("n_eta", cfg.qs_n_eta))
    if cp.has_section("sweep"):
        sw = cp["sweep"]
        cfg.sweep_axis = sw.get("axis") or None
        vals = [p.strip() for p in sw.get("values", "").split(",") if p.strip()]
        cfg.sweep_values = [float(v) for v in vals]
    if cp.has_section("control"):
        c = cp["control"]
        cfg.ctrl_state_i = int(c.get("state_i", cfg.ctrl_state_i))
        sf = c.get("state_f", "")
        cfg.ctrl_state_f = int(sf) if sf.strip() else None
        cfg.ctrl_coordinate = c.get("coordinate", cfg.ctrl_coordinate)
        cfg.ctrl_omega_count = int(c.get("omega_count", cfg.ctrl_omega_count))
        cfg.ctrl_omega_halfwidth = float(
            c.get("omega_halfwidth", cfg.ctrl_omega_halfwidth))
        if c.get("durations"):
            cfg.ctrl_durations = [
                float(p) for p in c["durations"].split(",") if p.strip()
            ]
        cfg.ctrl_e_field = float(c.get("e_field", cfg.ctrl_e_field))
        cfg.ctrl_prefactor = float(c.get("prefactor", cfg.ctrl_prefactor))
    return cfg


_MU_DEUTERON = ELECTRON_MASS / DEUTERON_MASS


def _box(form: str, half: float, n: int) -> list:
    names = FORM_AXES[form]
    return [(name, -half, half, n) for name in names]


PRESETS: dict[str, dict] = {
    # the 148x148 [-15,15]^2 planar case; k covers the proliferation zone
    "planar-deuteron": dict(
        form="planar_2var", axes=_box("planar_2var", 15.0, 148),
        mu=_MU_DEUTERON, z=1.0, k=16000, solver="auto",
    ),
    "cylinder-deuteron": dict(
        form="cylinder_2var", axes=_box("cylinder_2var", 15.0, 148),
        mu=_MU_DEUTERON, z=1.0, k=16000, solver="auto",
    ),
    # 28^3 = 21952 points; the box half-width reproducing the reported
    # onset values (the source never states it)
    "threevar-deuteron": dict(
        form="cylinder_3var", axes=_box("cylinder_3var", 7.5, 28),
        mu=_MU_DEUTERON, z=1.0, k=16000, solver="auto",
    ),
    "mu-study": dict(
        form="planar_2var", axes=_box("planar_2var", 15.0, 148),
        z=1.0, k=6000, solver="auto",
        sweep_axis="mu", sweep_values=[0.00027, 0.01, 0.1],
    ),
    "basis-convergence": dict(
        form="cylinder_2var", axes=_box("cylinder_2var", 15.0, 40),
        mu=_MU_DEUTERON, z=1.0, k=6000, solver="auto",
        sweep_axis="basis_size", sweep_values=[40, 60, 80, 100, 140],
    ),
    "quasistatic-default": dict(form="planar_2var", z=1.0),
    "control-default": dict(
        form="planar_2var", axes=_box("planar_2var", 15.0, 60),
        mu=_MU_DEUTERON, z=1.0, k=2000, solver="auto",
    ),
}


def preset_config(name: str) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        )
    cfg = RunConfig(**{**PRESETS[name]})
    cfg.preset = name
    return cfg


def apply_overrides(cfg: RunConfig, pairs: list[str]) -> RunConfig:
    """Apply command-line 'section.key=value' overrides via the INI round trip."""
    text = cfg.to_ini()
    cp = configparser.ConfigParser()
    cp.read_string(text)
    for pair in pairs:
        if "=" not in pair or "." not in pair.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value: {pair!r}")
        key, val = pair.split("=", 1)
        section, option = key.split(".", 1)
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section.strip(), option.strip(), val.strip())
    buf = io.StringIO()
    cp.write(buf)
    out = from_ini(buf.getvalue())
    return out
