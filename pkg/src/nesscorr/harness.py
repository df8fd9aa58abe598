"""Experiment orchestration: scans, constant fitting, identity suites.

A scan walks a grid of a single geometry variable (subsystem length or
the distance offset d_l - d_r), computes the requested measures from
exact correlation-matrix spectra, evaluates the matching closed-form
asymptotics, fits the one free additive constant per series by least
squares over a tail window, and emits plot-ready rows.

Configuration files are flat ``key = value`` text (``#`` comments); see
:func:`parse_config` for the schema.  Scans run sequentially so that a
given configuration always produces bit-identical output.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, replace

import numpy as np

from . import asymptotics, fisher_hartwig, measures
from .correlation import build_corr_matrix
from .densela import lu_logdet
from .errors import ConfigError, NesscorrError
from .model import BiasConfig, ConstantS, Geometry, ImpurityModel, SingleSite, mirror_overlap

MEASURE_NAMES = ("S_n", "MI_n", "MI", "E_n", "E")
DEGENERACY_RADIUS_DEFAULT = 5


@dataclass(frozen=True)
class ExperimentConfig:
    """One scan: model, bias, geometry template, grid, measures, outputs."""

    model: ImpurityModel
    bias: BiasConfig
    geometry: Geometry
    scan_variable: str                    # "length" | "offset"
    scan_values: tuple[int, ...]
    measures: tuple[str, ...]
    n_values: tuple[int, ...] = (2,)
    mode: str = "longrange"
    ell_r_ratio: int = 1                  # length scans: ell_r = ratio * ell
    offset_ratio: float = 0.0             # length scans: d_l - d_r = ratio * ell
    fit_window: str = "upper_half"        # "upper_half" | "all"
    degeneracy_radius: int = DEGENERACY_RADIUS_DEFAULT
    output_csv: str | None = None

    def __post_init__(self):
        if self.scan_variable not in ("length", "offset"):
            raise ConfigError(f"scan variable {self.scan_variable!r} unknown")
        if len(self.scan_values) == 0:
            raise ConfigError("scan grid must be nonempty")
        if any(b <= a for a, b in zip(self.scan_values, self.scan_values[1:])):
            raise ConfigError("scan grid must be strictly increasing")
        for m in self.measures:
            if m not in MEASURE_NAMES:
                raise ConfigError(f"unknown measure {m!r}")
        if self.mode not in ("longrange", "full"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if any(m in ("E_n",) for m in self.measures):
            if any(n % 2 for n in self.n_values):
                raise ConfigError("negativity measures need even Renyi indices")
        if self.fit_window not in ("upper_half", "all"):
            raise ConfigError(f"unknown fit window {self.fit_window!r}")


@dataclass
class ScanRow:
    """One (grid point, measure, index) record of a scan."""

    scan_value: int
    measure: str
    n: float
    numeric: float
    lin_term: float
    log_term: float
    const_fit: float
    residual: float
    degenerate: bool = False
    error: str | None = None


def geometry_at(cfg: ExperimentConfig, value: int) -> Geometry:
    g = cfg.geometry
    if cfg.scan_variable == "length":
        offset = int(round(cfg.offset_ratio * value))
        return replace(g, ell_l=int(value), ell_r=int(cfg.ell_r_ratio * value),
                       d_l=g.d_r + offset if offset >= 0 else g.d_r,
                       d_r=g.d_r if offset >= 0 else g.d_r - offset)
    return replace(g, d_l=g.d_r + int(value) if value >= 0 else g.d_r,
                   d_r=g.d_r if value >= 0 else g.d_r - int(value))


def _degenerate_distance(g: Geometry) -> int:
    """Distance (in sites) to the nearest vanishing length difference."""
    diffs = (g.ell_l + g.d_l - g.ell_r - g.d_r, g.d_l - g.d_r,
             g.ell_r + g.d_r - g.d_l, g.ell_l + g.d_l - g.d_r)
    return int(min(abs(d) for d in diffs))


def _numeric_measures(cfg: ExperimentConfig, g: Geometry,
                      cache: dict | None = None) -> dict:
    """Spectra-backed measure values, computing each matrix once."""
    cache = {} if cache is None else cache
    c_l = build_corr_matrix(cfg.model, cfg.bias, g, "A_L", cfg.mode, cache)
    c_r = build_corr_matrix(cfg.model, cfg.bias, g, "A_R", cfg.mode, cache)
    c_a = build_corr_matrix(cfg.model, cfg.bias, g, "A", cfg.mode, cache)
    out = {}
    for m in cfg.measures:
        if m == "MI":
            out[("MI", 1.0)] = measures.mutual_information(c_l, c_r, c_a).value
        elif m == "MI_n":
            for n in cfg.n_values:
                out[("MI_n", float(n))] = measures.mutual_information(
                    c_l, c_r, c_a, n).value
        elif m == "S_n":
            for n in cfg.n_values:
                out[("S_n", float(n))] = (measures.renyi_entropy(c_l, n).value
                                          + measures.renyi_entropy(c_r, n).value)
        elif m == "E":
            out[("E", 1.0)] = measures.fermionic_negativity(c_a, c_a.n_left).value
        elif m == "E_n":
            for n in cfg.n_values:
                out[("E_n", float(n))] = measures.renyi_negativity_eig(
                    c_a, c_a.n_left, n).value
    return out


def _analytic_prediction(cfg: ExperimentConfig, g: Geometry, measure: str,
                         n: float) -> asymptotics.AsymptoticPrediction:
    if measure == "MI":
        return asymptotics.vn_mi_asym(cfg.model, cfg.bias, g)
    if measure == "MI_n":
        return asymptotics.renyi_mi_asym(cfg.model, cfg.bias, g, n)
    if measure == "S_n":
        left = asymptotics.single_interval_entropy_asym(cfg.model, cfg.bias, g, "L", n)
        right = asymptotics.single_interval_entropy_asym(cfg.model, cfg.bias, g, "R", n)
        return asymptotics.AsymptoticPrediction(
            linear_coeff=left.linear_coeff,
            linear_length=float(g.ell_l + g.ell_r),
            log_terms=left.log_terms + right.log_terms)
    if measure == "E":
        return asymptotics.negativity_asym_symmetric(cfg.model, cfg.bias, g)
    if measure == "E_n":
        return asymptotics.negativity_asym_symmetric(cfg.model, cfg.bias, g, int(n))
    raise ConfigError(f"unknown measure {measure!r}")


def fit_constant(numeric, analytic_no_const, window) -> tuple[float, float]:
    """Least-squares additive constant over the window, plus its rms.

    With a single free constant the least-squares fit is the mean of the
    differences over the window indices.
    """
    window = list(window)
    if not window:
        raise ConfigError("fit window must be nonempty")
    diffs = np.asarray([numeric[i] - analytic_no_const[i] for i in window])
    constant = float(np.mean(diffs))
    rms = float(np.sqrt(np.mean((diffs - constant) ** 2)))
    return constant, rms


def _fit_indices(cfg: ExperimentConfig, count: int) -> list[int]:
    if cfg.fit_window == "all":
        return list(range(count))
    return list(range(count // 2, count))


def run_scan(cfg: ExperimentConfig) -> list[ScanRow]:
    """Execute a scan; failed grid points are recorded, not fatal."""
    grid = list(cfg.scan_values)
    per_point: list[dict | None] = []
    errors: list[str | None] = []
    entry_cache: dict = {}  # window integrals shared across the grid
    for value in grid:
        g = geometry_at(cfg, value)
        try:
            per_point.append(_numeric_measures(cfg, g, entry_cache))
            errors.append(None)
        except NesscorrError as exc:
            per_point.append(None)
            errors.append(f"{type(exc).__name__}: {exc}")

    keys: list[tuple[str, float]] = []
    for m in cfg.measures:
        if m in ("MI", "E"):
            keys.append((m, 1.0))
        else:
            keys.extend((m, float(n)) for n in cfg.n_values)

    rows: list[ScanRow] = []
    for measure, n in keys:
        numeric, lin, log = {}, {}, {}
        point_error: dict[int, str] = {}
        for i, value in enumerate(grid):
            g = geometry_at(cfg, value)
            if errors[i] is not None:
                point_error[i] = errors[i]
                continue
            try:
                pred = _analytic_prediction(cfg, g, measure, n)
            except NesscorrError as exc:
                point_error[i] = f"{type(exc).__name__}: {exc}"
                continue
            numeric[i] = per_point[i][(measure, n)]
            lin[i] = pred.linear_part
            log[i] = pred.log_part
        window = [i for i in _fit_indices(cfg, len(grid)) if i in numeric]
        if window:
            const, _ = fit_constant(numeric, {i: lin[i] + log[i] for i in numeric},
                                    window)
        else:
            const = 0.0
        for i, value in enumerate(grid):
            g = geometry_at(cfg, value)
            degenerate = _degenerate_distance(g) <= cfg.degeneracy_radius
            if i in point_error:
                rows.append(ScanRow(value, measure, n, np.nan, np.nan, np.nan,
                                    np.nan, np.nan, degenerate, point_error[i]))
                continue
            resid = numeric[i] - lin[i] - log[i] - const
            rows.append(ScanRow(value, measure, n, numeric[i], lin[i], log[i],
                                const, resid, degenerate))
    return rows


CSV_HEADER = ("scan_value", "measure", "n", "numeric", "lin_term", "log_term",
              "const_fit", "residual")


def rows_to_csv(rows) -> str:
    """Serialize rows with 12 significant digits, deterministically."""
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    for r in rows:
        fields = [str(r.scan_value), r.measure, f"{r.n:.12g}"]
        fields += [f"{x:.12g}" for x in
                   (r.numeric, r.lin_term, r.log_term, r.const_fit, r.residual)]
        buf.write(",".join(fields) + "\n")
    return buf.getvalue()


def scan_summary(rows) -> dict:
    failed = [r for r in rows if r.error is not None]
    degenerate = sorted({r.scan_value for r in rows if r.degenerate})
    return {
        "rows": len(rows),
        "failed_rows": len(failed),
        "errors": [{"scan_value": r.scan_value, "measure": r.measure,
                    "n": r.n, "error": r.error} for r in failed],
        "degenerate_scan_values": degenerate,
    }


# ---------------------------------------------------------------------------
# identity suite


def run_identities(n_values=(2, 3, 4, 5), even_n_values=(2, 4, 6),
                   t_grid=None) -> list[dict]:
    """Execute the gamma-sum and special-function identity suite.

    Returns one record per identity instance with its residual; failures
    are entries with large residuals, never exceptions.
    """
    if t_grid is None:
        t_grid = tuple(np.round(np.arange(0.1, 0.95, 0.1), 10))
    report: list[dict] = []

    def add(name, n, t, residual):
        report.append({"identity": name, "n": n, "T": t,
                       "residual": float(residual)})

    for n in sorted(set(n_values) | set(even_n_values)):
        for t in t_grid:
            res = fisher_hartwig.gamma_identities(float(t), int(n))
            wanted = ("square_log", "index_log", "cross_log")
            if n in even_n_values and "negativity_log" in res:
                wanted = wanted + ("negativity_log",)
            for key in wanted:
                add(key, n, float(t), res[key])
    for n in n_values:
        nf = float(n)
        add("Q_n(1)=0", n, 1.0, abs(asymptotics.q_n(1.0, nf)))
        add("Q_n(0)", n, 0.0,
            abs(asymptotics.q_n(0.0, nf) - (1.0 / nf - nf) / 12.0))
        add("Qt_n(0)=0", n, 0.0, abs(asymptotics.q_tilde_n(0.0, nf)))
        add("Qt_n(1)=0", n, 1.0, abs(asymptotics.q_tilde_n(1.0, nf)))
    for n in range(2, 9):
        gammas = fisher_hartwig.gamma_range(n)
        add("sum_gamma^2", n, float("nan"),
            abs(np.sum(gammas ** 2) - (n ** 3 - n) / 12.0))
    add("q(0)=0", 1, 0.0, abs(asymptotics.q_fun(0.0)))
    add("q(1)=0", 1, 1.0, abs(asymptotics.q_fun(1.0)))
    add("qt(0)=0", 1, 0.0, abs(asymptotics.q_tilde_fun(0.0)))
    add("qt(1)=0", 1, 1.0, abs(asymptotics.q_tilde_fun(1.0)))
    add("q(1/2)<0", 1, 0.5, 0.0 if asymptotics.q_fun(0.5) < 0 else 1.0)
    add("qt(1/2)>0", 1, 0.5, 0.0 if asymptotics.q_tilde_fun(0.5) > 0 else 1.0)
    return report


def identities_max_residuals(report) -> dict[str, float]:
    out: dict[str, float] = {}
    for entry in report:
        name = entry["identity"]
        out[name] = max(out.get(name, 0.0), entry["residual"])
    return out


# ---------------------------------------------------------------------------
# Fisher-Hartwig validation suite


def run_fh_validation(m_values=(256, 512, 1024), transmission=0.3,
                      n=2, gamma=0.5) -> list[dict]:
    """Exact-vs-asymptotic Toeplitz log-determinants for the symbol families.

    For each window case and symbol family, reports Re(ln det) exact and
    asymptotic per M, the fitted ln M coefficient and -sum beta^2.
    """
    # windows chosen so the leading finite-M transient still dominates the
    # oscillatory remainder at M = 256: the convergence of (exact - asym)
    # is then monotone at the probed sizes for either symbol family
    windows = {
        "containment": ((0.57, 2.10), (0.29, 2.41)),
        "disjoint": ((0.19, 0.62), (1.92, 2.65)),
        "partial": ((0.20, 0.80), (0.50, 1.20)),
    }
    out = []
    for case, (theta_l, theta_r) in windows.items():
        for family in ("mi", "negativity"):
            if family == "mi":
                symbol = fisher_hartwig.mi_symbol("A", gamma, n, theta_l,
                                                  theta_r, transmission)
            else:
                symbol = fisher_hartwig.negativity_symbol(gamma, n, theta_l,
                                                          theta_r, transmission)
            beta = symbol.beta_exponents()
            target = complex(-np.sum(beta ** 2))
            exact, asym = [], []
            for m in m_values:
                k = fisher_hartwig.toeplitz_from_symbol(symbol, m)
                exact.append(lu_logdet(k))
                asym.append(fisher_hartwig.fh_logdet_asym(symbol, m))
            diffs = [e.real - a.real for e, a in zip(exact, asym)]
            # remove the known linear term, then fit b*ln M + c through the ends
            lin = symbol_linear_coeff(symbol).real
            y = [e.real - lin * m for e, m in zip(exact, m_values)]
            b_fit = (y[-1] - y[0]) / (np.log(m_values[-1]) - np.log(m_values[0]))
            out.append({
                "case": case, "family": family,
                "m_values": list(m_values),
                "exact_re": [e.real for e in exact],
                "asym_re": [a.real for a in asym],
                "diff_re": diffs,
                "lnm_coeff_fit": float(b_fit),
                "lnm_coeff_expected": float(target.real),
            })
    return out


def symbol_linear_coeff(symbol: fisher_hartwig.PiecewiseSymbol) -> complex:
    """Coefficient of M in the symbol's FH expansion: the mean of ln phi."""
    if not symbol.jumps:
        return complex(np.log(symbol.values[0]))
    th = np.asarray(symbol.jumps, dtype=float)
    ends = np.append(th[1:], th[0] + 2 * np.pi)
    vals = np.asarray(symbol.values, dtype=complex)
    return complex(np.sum((ends - th) * np.log(vals)) / (2 * np.pi))


# ---------------------------------------------------------------------------
# configuration parsing


def _parse_kv(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _int_list(value: str) -> tuple[int, ...]:
    if ":" in value:
        parts = [int(x) for x in value.split(":")]
        if len(parts) == 2:
            parts.append(1)
        start, stop, step = parts
        return tuple(range(start, stop + 1, step))
    return tuple(int(x) for x in value.split(","))


def parse_config(text: str) -> ExperimentConfig:
    """Parse a flat key=value experiment configuration.

    Keys (defaults in brackets):
      model.kind            single_site | constant_s
      model.eps0, model.eta single_site on-site energy and hopping [eta=1]
      model.transmission    constant_s beamsplitter transmission
      bias.kf_l, bias.kf_r  Fermi momenta in radians; or bias.mu_l/mu_r
      bias.eta              hopping for mu-based input [1]
      geometry.m0, geometry.d_l, geometry.ell_l, geometry.d_r, geometry.ell_r
      scan.variable         length | offset
      scan.values           comma list, or start:stop[:step]
      scan.ell_r_ratio      length scans: ell_r = ratio * ell [1]
      scan.offset_ratio     length scans: d_l - d_r = ratio * ell [0]
      measures              comma subset of S_n, MI_n, MI, E_n, E
      n_values              comma list of Renyi indices [2]
      mode                  longrange | full [longrange]
      fit.window            upper_half | all [upper_half]
      fit.degeneracy_radius exclusion radius in sites [5]
      output.csv            path for the scan CSV [none]
    """
    kv = _parse_kv(text)

    def need(key):
        if key not in kv:
            raise ConfigError(f"missing required key {key!r}")
        return kv[key]

    kind = need("model.kind")
    if kind == "single_site":
        model: ImpurityModel = SingleSite(eps0=float(need("model.eps0")),
                                          eta=float(kv.get("model.eta", "1")))
    elif kind == "constant_s":
        model = ConstantS.beamsplitter(float(need("model.transmission")))
    else:
        raise ConfigError(f"unknown model.kind {kind!r}")

    eta = float(kv.get("bias.eta", kv.get("model.eta", "1")))
    if "bias.kf_l" in kv or "bias.kf_r" in kv:
        bias = BiasConfig.from_fermi_momenta(float(need("bias.kf_l")),
                                             float(need("bias.kf_r")), eta)
    else:
        bias = BiasConfig(eta=eta, mu_l=float(need("bias.mu_l")),
                          mu_r=float(need("bias.mu_r")))

    geometry = Geometry(m0=int(kv.get("geometry.m0", "0")),
                        d_l=int(kv.get("geometry.d_l", "0")),
                        ell_l=int(kv.get("geometry.ell_l", "1")),
                        d_r=int(kv.get("geometry.d_r", "0")),
                        ell_r=int(kv.get("geometry.ell_r", "1")))

    try:
        return ExperimentConfig(
            model=model, bias=bias, geometry=geometry,
            scan_variable=need("scan.variable"),
            scan_values=_int_list(need("scan.values")),
            measures=tuple(m.strip() for m in need("measures").split(",")),
            n_values=tuple(int(x) for x in kv.get("n_values", "2").split(",")),
            mode=kv.get("mode", "longrange"),
            ell_r_ratio=int(kv.get("scan.ell_r_ratio", "1")),
            offset_ratio=float(kv.get("scan.offset_ratio", "0")),
            fit_window=kv.get("fit.window", "upper_half"),
            degeneracy_radius=int(kv.get("fit.degeneracy_radius",
                                         str(DEGENERACY_RADIUS_DEFAULT))),
            output_csv=kv.get("output.csv"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def measure_point(cfg: ExperimentConfig) -> dict:
    """Single-configuration evaluation for the `measure` subcommand."""
    g = cfg.geometry
    numeric = _numeric_measures(cfg, g)
    result = {}
    for (measure, n), value in sorted(numeric.items()):
        record = {"numeric": value}
        try:
            pred = _analytic_prediction(cfg, g, measure, n)
            record["lin_term"] = pred.linear_part
            record["log_term"] = pred.log_part
        except NesscorrError as exc:
            record["analytic_error"] = f"{type(exc).__name__}: {exc}"
        result[f"{measure}[n={n:g}]"] = record
    ell_mirror, dl_l, dl_r = mirror_overlap(g)
    return {"geometry": {"ell_mirror": ell_mirror, "delta_ell_l": dl_l,
                         "delta_ell_r": dl_r},
            "measures": result}


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
