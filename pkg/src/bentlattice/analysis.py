"""Spectral diagnostics, experiment configuration and deterministic file output."""
from dataclasses import asdict, dataclass, field
import csv
import hashlib
import io
import json
import logging
import math
from pathlib import Path

import numpy as np

from .coupling import anisotropy_scan, coupling_law
from .defect_opt import corner_coupling, optimize_detuning
from .errors import BentLatticeError, ConfigError, NonHermitianError
from .lattice import build_layout, coupling_matrix, relative_coupling_map
from .mode_solver import WaveguideSpec, solve_mode
from .propagation import (
    corner_power_trace,
    evolve,
    output_intensity_map,
    transfer_loss,
)

__all__ = [
    "SpectrumReport",
    "spectrum_spacings",
    "ExperimentConfig",
    "ExperimentReport",
    "run_experiment",
    "table1_report",
    "default_config",
    "FLOAT_FORMAT",
]

log = logging.getLogger(__name__)

FLOAT_FORMAT = "{:.9e}"


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return FLOAT_FORMAT.format(float(x))


# ---------------------------------------------------------------- spectrum


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    spacings: np.ndarray
    rms_deviation: float
    rms_deviation_trimmed: float


def _rms_about_mean(d):
    if d.size == 0:
        return 0.0
    return float(np.sqrt(np.mean((d - d.mean()) ** 2)))


def spectrum_spacings(hamiltonian):
    """Sorted eigenvalues, their successive differences and the spread of those differences.

    ``rms_deviation`` is zero exactly for an equidistant spectrum. The trimmed
    variant drops the two outermost spacings.
    """
    m = np.asarray(getattr(hamiltonian, "matrix", hamiltonian))
    scale = max(float(np.abs(m).max()), 1e-300)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or np.abs(m - m.conj().T).max() > 1e-10 * scale:
        raise NonHermitianError("spectrum requires a Hermitian matrix")
    w = np.linalg.eigvalsh(m)
    d = np.diff(w)
    return SpectrumReport(w, d, _rms_about_mean(d), _rms_about_mean(d[1:-1]))


# ---------------------------------------------------------------- configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs. Lengths in um unless the name says otherwise."""

    width_um: float = 6.0
    height_um: float = 2.0
    n_substrate: float = 1.444
    delta_n: float = 1e-3
    wavelength_um: float = 0.8
    n_sites: int = 9
    corner: int | None = None
    length_cm: float = 10.0
    angles_pi32: tuple = (0.0, 16.0, 18.0, 19.0, 20.0)
    optimize: bool = True
    emit_intensity: bool = False
    output_dir: str | None = None
    grid_step_um: float = 0.1
    grid_margin_um: float = 10.0
    fit_range_um: tuple = (15.0, 40.0, 1.0)
    scan_r_um: tuple = (15.0, 20.0, 30.0, 40.0)
    scan_n_theta: int = 33
    r_floor_um: float = 8.0
    r_ceiling_um: float = 100.0
    detuning_bracket: float = 3.0
    detuning_xatol: float = 1e-6
    trace_points: int = 201

    def __post_init__(self):
        positive = (
            "width_um",
            "height_um",
            "n_substrate",
            "delta_n",
            "wavelength_um",
            "length_cm",
            "grid_step_um",
            "r_floor_um",
            "r_ceiling_um",
            "detuning_bracket",
            "detuning_xatol",
        )
        for name in positive:
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
                raise ConfigError(name, f"must be a positive number, got {v!r}")
        if self.width_um < self.height_um:
            raise ConfigError("height_um", "must not exceed width_um")
        if not self.delta_n < 0.5:
            raise ConfigError("delta_n", "must be below 1/2")
        if not isinstance(self.n_sites, int) or self.n_sites < 3:
            raise ConfigError("n_sites", "must be an integer >= 3")
        corner = self.corner
        if corner is None:
            if self.n_sites % 2 == 0:
                raise ConfigError("corner", "required when n_sites is even")
            object.__setattr__(self, "corner", (self.n_sites + 1) // 2)
        elif not isinstance(corner, int) or not 1 < corner < self.n_sites:
            raise ConfigError("corner", f"must be an interior site label, got {corner!r}")
        angles = tuple(float(a) for a in self.angles_pi32)
        for a in angles:
            if not 0 <= a < 32:
                raise ConfigError("angles_pi32", f"angle {a} (x pi/32) outside [0, 32)")
        object.__setattr__(self, "angles_pi32", angles)
        if self.r_floor_um >= self.r_ceiling_um:
            raise ConfigError("r_ceiling_um", "must exceed r_floor_um")
        if self.grid_step_um > 0.5:
            raise ConfigError("grid_step_um", "must be <= 0.5")
        if len(self.fit_range_um) != 3:
            raise ConfigError("fit_range_um", "expected [start, stop, step]")
        if not (isinstance(self.trace_points, int) and self.trace_points >= 2):
            raise ConfigError("trace_points", "must be an integer >= 2")
        object.__setattr__(self, "fit_range_um", tuple(float(v) for v in self.fit_range_um))
        object.__setattr__(self, "scan_r_um", tuple(float(v) for v in self.scan_r_um))

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(unknown[0], "unknown configuration field")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        try:
            d = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", f"cannot read {path}: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigError("config", "top level must be a JSON object")
        return cls.from_dict(d)

    def to_dict(self):
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d

    def physics_dict(self):
        """Configuration without where-to-write fields; what the digest covers."""
        d = self.to_dict()
        d.pop("output_dir")
        return d

    def digest(self):
        blob = json.dumps(self.physics_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def spec(self):
        return WaveguideSpec.from_microns(self.width_um, self.height_um, self.n_substrate, self.delta_n)

    @property
    def wavelength(self):
        return self.wavelength_um * 1e-6

    @property
    def angles(self):
        return [a * math.pi / 32 for a in self.angles_pi32]

    def layout(self, angle):
        return build_layout(
            self.n_sites,
            self.corner,
            angle,
            self.length_cm,
            self.spec,
            self.wavelength,
            self.r_floor_um,
            self.r_ceiling_um,
        )


def default_config(**overrides):
    """Default configuration: N=9, C=5, L=10 cm, 6x2 um guides at 800 nm."""
    return ExperimentConfig(**overrides)


# ---------------------------------------------------------------- file output


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _angle_tag(pi32):
    return f"{pi32:g}".replace(".", "p") + "pi32"


@dataclass
class ExperimentReport:
    """Results of :func:`run_experiment`; ``files`` maps names to content digests."""

    config: ExperimentConfig
    transfers: list = field(default_factory=list)
    defects: dict = field(default_factory=dict)
    spectra: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    files: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.failures


class _Writer:
    def __init__(self, out_dir, report):
        self.out = Path(out_dir) if out_dir is not None else None
        self.report = report
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)

    def write(self, name, text):
        data = text.encode()
        self.report.files[name] = hashlib.sha256(data).hexdigest()
        if self.out is not None:
            (self.out / name).write_bytes(data)


def _transfer_row(tr):
    pi32 = tr.bend_angle * 32 / math.pi
    return [tr.bend_angle, pi32, tr.detuning, *tr.powers, tr.loss, tr.optimized]


def _transfer_header(n):
    return ["angle_rad", "pi32", "delta_cm-1", *[f"P_{j}" for j in range(1, n + 1)], "loss", "optimized"]


TABLE1_HEADER = [
    "angle_rad",
    "pi32",
    "delta_cm-1",
    "ratio_abs_delta_over_G",
    "G_corner_cm-1",
    "index_change_pct",
    "size_change_pct",
    "loss_before",
    "loss_after",
]


def _table1_row(res):
    return [
        res.bend_angle,
        res.bend_angle * 32 / math.pi,
        res.detuning,
        res.ratio,
        res.corner_coupling,
        res.index_change,
        res.size_change,
        res.loss_before,
        res.loss_after,
    ]


def _run_angle(cfg, pi32, writer, report, emit_intensity, optimize):
    angle = pi32 * math.pi / 32
    tag = _angle_tag(pi32)
    layout = cfg.layout(angle)
    h = coupling_matrix(layout)
    writer.write(f"layout_{tag}.json", layout.to_json(indent=2, sort_keys=True) + "\n")
    n = layout.n_sites
    idx = [[i + 1, j + 1, h.matrix[i, j], rel] for (i, j), rel in np.ndenumerate(relative_coupling_map(h))]
    writer.write(f"coupling_{tag}.csv", _csv_text(["m", "l", "H_cm-1", "relative"], idx))

    base = transfer_loss(layout, 0.0, hamiltonian=h)
    report.transfers.append(base)
    spectra = {"bare": spectrum_spacings(h)}
    delta = 0.0
    if optimize:
        res = optimize_detuning(
            layout,
            bracket=(-cfg.detuning_bracket * corner_coupling(layout), cfg.detuning_bracket * corner_coupling(layout)),
            xatol=cfg.detuning_xatol,
        )
        report.defects[pi32] = res
        delta = res.detuning
        report.transfers.append(transfer_loss(layout, delta, hamiltonian=h, optimized=True))
        spectra["optimized"] = spectrum_spacings(h.with_detuning(delta))
    report.spectra[pi32] = spectra

    rows = []
    for kind, sp in spectra.items():
        for k, ev in enumerate(sp.eigenvalues):
            spacing = sp.spacings[k] if k < sp.spacings.size else math.nan
            rows.append([kind, k + 1, ev, spacing])
    writer.write(f"spectrum_{tag}.csv", _csv_text(["kind", "k", "eigenvalue_cm-1", "spacing_cm-1"], rows))

    z = np.linspace(0.0, layout.length, cfg.trace_points)
    trace = corner_power_trace(layout, delta, z, hamiltonian=h)
    writer.write(
        f"corner_trace_{tag}.csv",
        _csv_text(["z_cm", "P_corner", "delta_cm-1"], [[zz, p, delta] for zz, p in trace]),
    )
    if emit_intensity:
        a_out = evolve(h.with_detuning(delta), layout.length, np.eye(n, dtype=complex)[0])
        imap = output_intensity_map(layout, a_out, cfg.grid_step_um, cfg.grid_margin_um)
        writer.write(
            f"intensity_{tag}.csv",
            _csv_text(["x_um", "y_um", "intensity_W_cm2"], imap.to_rows()),
        )


def run_experiment(config, out_dir=None, optimize=None, emit_intensity=None):
    """Sweep the configured bend angles and write every table and trace.

    Failures at one angle are recorded in ``report.failures`` and do not stop
    the others. ``manifest.json`` is written last and lists every emitted file
    with its SHA-256 digest and the configuration digest.
    """
    optimize = config.optimize if optimize is None else optimize
    emit_intensity = config.emit_intensity if emit_intensity is None else emit_intensity
    out_dir = out_dir if out_dir is not None else config.output_dir
    report = ExperimentReport(config)
    writer = _Writer(out_dir, report)
    for pi32 in config.angles_pi32:
        try:
            _run_angle(config, pi32, writer, report, emit_intensity, optimize)
        except BentLatticeError as exc:
            log.warning("angle %g pi/32 failed: %s", pi32, exc)
            report.failures[pi32] = f"{type(exc).__name__}: {exc}"
    if config.angles_pi32:
        n = config.n_sites
        writer.write("losses.csv", _csv_text(_transfer_header(n), [_transfer_row(t) for t in report.transfers]))
        summary = []
        for pi32, sp in report.spectra.items():
            opt = sp.get("optimized")
            summary.append(
                [
                    pi32 * math.pi / 32,
                    pi32,
                    sp["bare"].rms_deviation,
                    sp["bare"].rms_deviation_trimmed,
                    opt.rms_deviation if opt else math.nan,
                    opt.rms_deviation_trimmed if opt else math.nan,
                ]
            )
        writer.write(
            "spectrum_summary.csv",
            _csv_text(["angle_rad", "pi32", "rms", "rms_trimmed", "rms_optimized", "rms_trimmed_optimized"], summary),
        )
        if report.defects:
            writer.write("table1.csv", _csv_text(TABLE1_HEADER, [_table1_row(r) for r in report.defects.values()]))
    _write_manifest(writer, report)
    return report


def _write_manifest(writer, report):
    manifest = {
        "input_sha256": report.config.digest(),
        "config": report.config.physics_dict(),
        "files": [{"name": k, "sha256": report.files[k]} for k in sorted(report.files)],
        "failures": {_angle_tag(k): v for k, v in sorted(report.failures.items())},
    }
    text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    if writer.out is not None:
        (writer.out / "manifest.json").write_text(text)
    return manifest


def table1_report(config):
    """Optimal corner detunings and fabrication changes, one CSV row per angle."""
    rows = []
    for pi32 in config.angles_pi32:
        layout = config.layout(pi32 * math.pi / 32)
        g = corner_coupling(layout)
        res = optimize_detuning(
            layout,
            bracket=(-config.detuning_bracket * g, config.detuning_bracket * g),
            xatol=config.detuning_xatol,
        )
        rows.append(_table1_row(res))
    return _csv_text(TABLE1_HEADER, rows)


# ---------------------------------------------------------------- single-purpose emitters


def modes_csv(config):
    """Mode parameters of the configured guide, lengths in um and wavenumbers in 1/cm."""
    mode = solve_mode(config.spec, config.wavelength)
    row = [
        config.width_um,
        config.height_um,
        config.n_substrate,
        config.delta_n,
        config.wavelength_um,
        mode.kx * 1e-2,
        mode.ky * 1e-2,
        mode.gamma_x * 1e-2,
        mode.gamma_y * 1e-2,
        mode.beta * 1e-2,
        mode.amplitude,
    ]
    header = [
        "width_um",
        "height_um",
        "n_substrate",
        "delta_n",
        "wavelength_um",
        "kx_cm-1",
        "ky_cm-1",
        "gamma_x_cm-1",
        "gamma_y_cm-1",
        "beta_cm-1",
        "amplitude_V_m",
    ]
    return _csv_text(header, [row])


def coupling_scan_csv(config):
    """Anisotropy scans at the configured separations plus exponential fits per angle."""
    mode = solve_mode(config.spec, config.wavelength)
    thetas = np.linspace(0.0, math.pi / 2, config.scan_n_theta)
    scan_rows = []
    for r in config.scan_r_um:
        for theta, j in anisotropy_scan(mode, r * 1e-6, thetas):
            scan_rows.append([r, theta, j * 1e-2])
    start, stop, step = config.fit_range_um
    r_fit = np.arange(start, stop + 0.5 * step, step) * 1e-6
    fit_rows = []
    for theta in thetas:
        law = coupling_law(mode, theta, r_fit)
        fit_rows.append([theta, law.prefactor * 1e-2, law.decay * 1e-6, law.residual])
    return (
        _csv_text(["r_um", "theta_rad", "J_cm-1"], scan_rows),
        _csv_text(["theta_rad", "mu_cm-1", "xi_um-1", "rms_log_residual"], fit_rows),
    )
