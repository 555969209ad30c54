"""The verification suites behind the command line, one function per experiment.

Each experiment takes an :class:`ExperimentConfig` and returns a list of
:class:`ResultRecord`; a record passes when ``abs_err <= atol + rtol * |expected|``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError
from .numerics import QuadratureConfig

log = logging.getLogger(__name__)

# values of the provenance column of the result tables
PROVENANCES = ("paper", "trivial", "derived")
PUBLISHED, TRIVIAL, DERIVED = PROVENANCES


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    quadrature: QuadratureConfig = QuadratureConfig()
    k_max: int = 16
    lambda_cutoff: float | None = None
    L: float = 4.5
    p: int = 2
    output_path: str = "."
    seed: int = 0
    options: dict = field(default_factory=dict)

    def option(self, key: str, default, kind: Callable = str):
        raw = self.options.get(key)
        if raw is None:
            return default
        try:
            return kind(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"option {key!r} = {raw!r}: {exc}") from None


@dataclass(frozen=True)
class ResultRecord:
    name: str
    computed: complex
    expected: complex | None
    abs_err: float
    rel_err: float
    runtime_ms: int
    provenance: str
    atol: float = 0.0
    rtol: float = 0.0
    passed: bool = True
    note: str = ""

    @classmethod
    def compare(cls, name: str, computed, expected, provenance: str, runtime_ms: int,
                atol: float = 0.0, rtol: float = 0.0, note: str = "") -> "ResultRecord":
        if provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")
        computed = complex(computed)
        if expected is None:
            return cls(name, computed, None, math.nan, math.nan, runtime_ms, provenance, atol, rtol, True, note)
        expected = complex(expected)
        abs_err = abs(computed - expected)
        rel_err = abs_err / abs(expected) if expected != 0 else (0.0 if abs_err == 0 else math.inf)
        passed = abs_err <= atol + rtol * abs(expected)
        return cls(name, computed, expected, abs_err, rel_err, runtime_ms, provenance, atol, rtol, passed, note)


class _Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = int(round(1000 * (time.perf_counter() - self.start)))


def _check_shift(value: float, what: str = "L"):
    if not value > 0 or abs(value - round(value)) < 1e-9:
        raise ConfigError(f"{what} = {value} must be a positive non-integer: "
                          "an integer contour height passes through a resonance")


def _pw_or_zero(raw: str, max_real: float):
    from .numerics import EvenPWFunction, make_even_pw
    if str(raw).strip().lower() in ("zero", "0", "none"):
        return EvenPWFunction.zero()
    try:
        b = float(raw)
    except ValueError:
        raise ConfigError(f"channel half-width {raw!r} is neither a number nor 'zero'") from None
    if not b > 0:
        raise ConfigError("channel half-widths must be positive")
    return make_even_pw(b, max_real=max_real)


# ---------------------------------------------------------------------------
# O(1,1) side
# ---------------------------------------------------------------------------

def _o11_bumps():
    from .numerics import make_bump_mode, make_bump_radial, make_bump_sector
    return [
        make_bump_radial(2.0, 1.0),
        make_bump_mode(1.5, 0.8, 2, "cos"),
        make_bump_mode(2.0, 1.0, 1, "sin"),
        make_bump_sector(2.0, 0.7, 0.3, 0.8),
        make_bump_mode(2.5, 1.2, 3, "cos"),
    ]


def run_mellin_check(cfg: ExperimentConfig) -> list[ResultRecord]:
    from .mellin import MellinTransform, choose_lambda_cutoff, plancherel_pair
    from .numerics import l2_inner_product, make_bump_mode, make_bump_radial
    rng = np.random.default_rng(cfg.seed)
    n_points = cfg.option("points", 3, int)
    records = []
    bumps = _o11_bumps()
    # The sector bump has every angular mode; 16 modes leave a 1e-4 truncation error at a point.
    sector_k_max = max(cfg.k_max, cfg.option("sector_k_max", 256, int))

    def modes_for(*fs):
        return sector_k_max if any(f.parity == "mixed" for f in fs) else cfg.k_max

    for j, v in enumerate(bumps):
        transform = MellinTransform(v, modes_for(v))
        cutoff = cfg.lambda_cutoff or choose_lambda_cutoff(transform)
        for i in range(n_points):
            r = rng.uniform(v.support_inner, v.support_outer)
            theta = rng.uniform(0, 2 * math.pi)
            w = np.array([r * math.cos(theta), r * math.sin(theta)])
            with _Timer() as tm:
                from .mellin import mellin_invert
                rec = mellin_invert(transform, w, cutoff, cfg.quadrature)
            exact = complex(v(w))
            records.append(ResultRecord.compare(f"inversion bump{j} point{i} (cutoff {cutoff:g})", rec, exact,
                                                PUBLISHED, tm.ms, atol=1e-6 * (1 + abs(exact))))
    # pairs with nonzero inner products, so that the relative tolerance means something
    pairs = [(bumps[0], make_bump_radial(1.8, 0.9)), (bumps[1], make_bump_mode(2.0, 1.0, 2, "cos")),
             (bumps[2], bumps[3]), (bumps[3], bumps[4]), (bumps[0], bumps[3])]
    for j, (u, v) in enumerate(pairs):
        with _Timer() as tm:
            spectral = plancherel_pair(u, v, cfg.lambda_cutoff, cfg.quadrature, modes_for(u, v))
        direct = l2_inner_product(u, v, panels=96, n_angle=512)
        records.append(ResultRecord.compare(f"plancherel pair{j} vs direct quadrature", spectral, direct, PUBLISHED,
                                            tm.ms, atol=1e-12, rtol=1e-6))
    return records


def run_o11_resonance(cfg: ExperimentConfig) -> list[ResultRecord]:
    from .mellin import bilinear_pair_at
    from .numerics import make_bump_mode, make_bump_radial
    from .o11_resolvent import (ResolventPairing, continued_resolvent_many, residue_at_zero_paths,
                                resolvent_pair)
    depth = cfg.option("N", 1.0, float)
    pairs = [
        ("radial,radial", make_bump_radial(2.0, 1.0), make_bump_radial(2.0, 1.0)),
        ("mode2,mode2", make_bump_mode(2.0, 1.0, 2, "cos"), make_bump_mode(1.5, 0.8, 2, "cos")),
        ("odd,radial", make_bump_mode(2.0, 1.0, 1, "cos"), make_bump_radial(2.0, 1.0)),
    ]
    records = []
    rng = np.random.default_rng(cfg.seed)
    for label, u, v in pairs:
        rp = ResolventPairing(u, v, cfg.k_max)
        with _Timer() as tm:
            check = residue_at_zero_paths(rp, depth, cfg.quadrature)
        expected = 0.5j * bilinear_pair_at(u, v, 0.0, cfg.quadrature, cfg.k_max)
        records.append(ResultRecord.compare(f"residue_at_zero vs (i/2)int v0 u0 [{label}]", check.contour_value,
                                            expected, PUBLISHED, tm.ms, atol=1e-8, rtol=1e-4))
        zs = rng.uniform(-2, 2, 3) + 1j * rng.uniform(0.2, 2, 3)
        with _Timer() as tm:
            cont = continued_resolvent_many(rp, zs, depth, cfg.quadrature)
        for z, c in zip(zs, cont):
            records.append(ResultRecord.compare(f"continued vs direct at {z:.3f} [{label}]", c,
                                                resolvent_pair(rp, z, cfg.quadrature), PUBLISHED, tm.ms,
                                                atol=1e-12, rtol=1e-7))
    return records


def run_o11_rep(cfg: ExperimentConfig) -> list[ResultRecord]:
    from .o11_representation import (apply_s_mode, lipschitz_closed_form, lipschitz_integral,
                                     s_mode_eigenvalue_estimate)
    records = []
    for k in range(-4, 5):
        with _Timer() as tm:
            est = s_mode_eigenvalue_estimate(k, cfg=cfg.quadrature)
        records.append(ResultRecord.compare(f"flip eigenvalue on g_{k}", est, apply_s_mode(k), PUBLISHED, tm.ms,
                                            rtol=0.01))
    for k in (-3, 0, 2, 4):
        for t in (1.0, 0.1):
            for r in (0.5, 2.0):
                with _Timer() as tm:
                    val = lipschitz_integral(k, t, r, cfg.quadrature)
                records.append(ResultRecord.compare(f"Lipschitz k={k} t={t} r={r}", val,
                                                    lipschitz_closed_form(k, t, r), DERIVED, tm.ms,
                                                    atol=1e-8))
    return records


def run_weil_check(cfg: ExperimentConfig) -> list[ResultRecord]:
    from .numerics import make_bump_mode, make_bump_radial
    from .o11_representation import (O11Element, SquareGrid, SymplecticMatrix4, apply_flip_twice,
                                     flip_conjugation_sides, theta_squared)
    records = []
    grid = SquareGrid.self_dual(cfg.option("grid_points", 401, int))
    v = grid.sample(make_bump_radial(2.0, 1.0))
    with _Timer() as tm:
        twice = apply_flip_twice(v, grid)
    records.append(ResultRecord.compare("flip squared = identity (relative L2 defect)",
                                        grid.l2_norm(twice - v) / grid.l2_norm(v), 0.0, PUBLISHED, tm.ms, atol=1e-6))
    flip = SymplecticMatrix4.from_o11(O11Element(1.0, True))
    with _Timer() as tm:
        sq = theta_squared(flip)
    records.append(ResultRecord.compare("|Theta^2(s)| from the determinant formula", abs(sq.theta_squared), 0.25,
                                        PUBLISHED, tm.ms, atol=1e-12))
    records.append(ResultRecord.compare("Theta^2(s) against 1/4", sq.theta_squared, 0.25,
                                        PUBLISHED, tm.ms, atol=1e-12,
                                        note="the determinant formula gives i/4"))
    fine = SquareGrid(cfg.option("conjugation_points", 1001, int), 0.01)
    out = np.linspace(-2, 2, 41)
    bump = make_bump_mode(1.0, 0.5, 1, "cos")
    for a in (0.5, -2.0):
        with _Timer() as tm:
            left, right = flip_conjugation_sides(bump, a, fine, out)
        records.append(ResultRecord.compare(f"flip conjugates h_a to h_(1/a), a={a}",
                                            np.linalg.norm(left - right) / np.linalg.norm(right), 0.0, PUBLISHED,
                                            tm.ms, atol=1e-6))
    return records


# ---------------------------------------------------------------------------
# SL2 side
# ---------------------------------------------------------------------------

def run_sl2_model(cfg: ExperimentConfig) -> list[ResultRecord]:
    from .sl2.spectral import ContinuedModelResolvent, model_resolvent
    _check_shift(cfg.L)
    f0 = _pw_or_zero(cfg.option("f0_halfwidth", "1.0"), 1500.0)
    f1 = _pw_or_zero(cfg.option("f1_halfwidth", "0.7"), 1500.0)
    rng = np.random.default_rng(cfg.seed)
    records = []
    with _Timer() as tm:
        cont = ContinuedModelResolvent(f0, f1, cfg.L)
    log.info("continued resolvent built in %d ms", tm.ms)
    n_points = cfg.option("points", 4, int)
    zs = rng.uniform(-2.5, 2.5, n_points) + 1j * rng.uniform(0.15, 0.85, n_points)
    for z in zs:
        with _Timer() as tm:
            direct = model_resolvent(f0, f1, z, cfg.quadrature)
        records.append(ResultRecord.compare(f"continued vs direct at {z:.3f}", cont(z), direct, PUBLISHED, tm.ms,
                                            atol=1e-14, rtol=1e-8))
    for n in range(int(math.floor(cfg.L)) + 1):
        if n >= cfg.L - 0.1:
            break
        with _Timer() as tm:
            res = cont.residue(n)
        predicted = cont.predicted_residue(n)
        if predicted == 0:
            records.append(ResultRecord.compare(f"residue at -{n}i (channel is zero)", res, 0.0, PUBLISHED, tm.ms,
                                                atol=1e-10))
        else:
            records.append(ResultRecord.compare(f"residue at -{n}i", res, predicted, PUBLISHED, tm.ms, rtol=1e-6))
    return records


def run_resonance_scan(cfg: ExperimentConfig) -> list[ResultRecord]:
    from .sl2.spectral import ContinuedModelResolvent, locate_resonances
    _check_shift(cfg.L)
    f0 = _pw_or_zero(cfg.option("f0_halfwidth", "1.0"), 1500.0)
    f1 = _pw_or_zero(cfg.option("f1_halfwidth", "0.7"), 1500.0)
    with _Timer() as tm:
        cont = ContinuedModelResolvent(f0, f1, cfg.L)
        found = locate_resonances(f0, f1, cfg.L, cfg.option("half_width", 1.0, float), resolvent=cont)
    expected = [n for n in range(int(math.ceil(cfg.L))) if n < cfg.L and cont.predicted_residue(n) != 0]
    records = [ResultRecord.compare("number of poles", len(found), len(expected), PUBLISHED, tm.ms)]
    for n in expected:
        near = [r for r in found if abs(r.location + 1j * n) < 1e-6]
        loc = near[0].location if near else complex(math.nan, math.nan)
        records.append(ResultRecord.compare(f"pole at -{n}i", loc, -1j * n, PUBLISHED, tm.ms, atol=1e-6))
        if near:
            records.append(ResultRecord.compare(f"residue at -{n}i", near[0].residue, cont.predicted_residue(n),
                                                PUBLISHED, tm.ms, rtol=1e-6))
    for r in found:
        if not any(abs(r.location + 1j * n) < 1e-6 for n in expected):
            records.append(ResultRecord.compare(f"unexpected pole at {r.location:.6f}", r.location, None, PUBLISHED,
                                                tm.ms, note="spurious"))
            records[-1] = ResultRecord(**{**records[-1].__dict__, "passed": False})
    return records


def run_sl2_endtoend(cfg: ExperimentConfig) -> list[ResultRecord]:
    from .sl2.m2p import make_gram_test_function
    from .sl2.orbital import OrbitalGrid, orbital_profile
    from .sl2.spectral import ContinuedModelResolvent
    if cfg.p != 2:
        raise ConfigError("the end-to-end experiment is implemented for p = 2")
    shift = cfg.option("shift", 1.5, float)
    _check_shift(shift, "shift")
    grid = OrbitalGrid.fine() if cfg.option("grid", "default") == "fine" else OrbitalGrid()
    u = make_gram_test_function(angular=((0, 1.0), (2, 0.4)))
    v = make_gram_test_function(r_inner=1.1, r_outer=1.7, angular=((0, 1.0), (-2, 0.3)))
    with _Timer() as tm:
        profile = orbital_profile(u, v, False, grid)
    records = [ResultRecord.compare("orbital profile symmetry F(t) = F(-t)", profile.symmetry_defect(), 0.0,
                                    PUBLISHED, tm.ms, atol=1e-3)]
    f0 = profile.channel_function(0)
    lam = np.linspace(0.0, 20.0, 81)
    values = f0(lam)
    mirrored = f0(-lam)
    defect = float(np.max(np.abs(values - mirrored)) / np.max(np.abs(values)))
    records.append(ResultRecord.compare("f_0 evenness on [0, 20] (relative to max |f_0|)", defect, 0.0, PUBLISHED,
                                        tm.ms, atol=0.01))
    with _Timer() as tm:
        cont = ContinuedModelResolvent(f0, profile.channel_function(1), shift)
        res = cont.residue(1)
    records.append(ResultRecord.compare("residue at -i vs (i/2pi) f_0(i)", res, 1j * f0(1j) / (2 * math.pi),
                                        PUBLISHED, tm.ms, rtol=0.05))
    return records


def run_capelli_check(cfg: ExperimentConfig) -> list[ResultRecord]:
    from .sl2.capelli import (TRACE, capelli_identity_check, casimir_operator, euler_plus_one_squared,
                              make_trial_functions, matrix_symbols, positive_capelli_eigenvalue)
    if cfg.p < 2:
        raise ConfigError("the Capelli check on M_{2,p} needs p >= 2")
    rng = np.random.default_rng(cfg.seed)
    records = []
    points = rng.uniform(0.3, 2.0, (6, 2)) * rng.choice([-1, 1], (6, 2))
    for lam in (0.0, 0.7, 2.5):
        for k in (0, 3):
            with _Timer() as tm:
                vals = positive_capelli_eigenvalue(lam, k, points)
            worst = vals[np.argmax(np.abs(vals - lam ** 2))]
            records.append(ResultRecord.compare(f"C+ on r^(-1-i{lam}) e^(i{k}theta) gives lam^2", worst, lam ** 2,
                                                PUBLISHED, tm.ms, atol=1e-8))
    xs = matrix_symbols(1)
    with _Timer() as tm:
        lhs = -euler_plus_one_squared(xs)
        rhs = -(casimir_operator(1)) - type(lhs).multiplication(xs, 1)
        same = lhs.equals(rhs)
    records.append(ResultRecord.compare("-(E+1)^2 equals -casimir - 1 (exact)", float(same), 1.0, DERIVED, tm.ms))
    trials = make_trial_functions(cfg.p, cfg.option("trials", 10, int), seed=cfg.seed)
    with _Timer() as tm:
        report = capelli_identity_check(cfg.p, trials)
    records.append(ResultRecord.compare(f"Capelli constant p={cfg.p} (half-trace form)", report.fitted_constant,
                                        report.target, PUBLISHED, tm.ms, atol=1e-8))
    records.append(ResultRecord.compare("spread of per-function constants", report.spread, 0.0, PUBLISHED, tm.ms,
                                        atol=1e-8))
    if cfg.option("trace_form", "no") in ("yes", "true", "1"):
        with _Timer() as tm:
            plain = capelli_identity_check(cfg.p, trials, form_scale=TRACE)
        records.append(ResultRecord.compare("Capelli constant with the plain trace form", plain.fitted_constant,
                                            plain.target, DERIVED, tm.ms,
                                            note=f"spread {plain.spread:.3g}; not a scalar operator"))
    return records


EXPERIMENTS: dict[str, Callable[[ExperimentConfig], list[ResultRecord]]] = {
    "mellin-check": run_mellin_check,
    "o11-resonance": run_o11_resonance,
    "o11-rep": run_o11_rep,
    "weil-check": run_weil_check,
    "sl2-model": run_sl2_model,
    "sl2-endtoend": run_sl2_endtoend,
    "capelli-check": run_capelli_check,
    "resonance-scan": run_resonance_scan,
}
