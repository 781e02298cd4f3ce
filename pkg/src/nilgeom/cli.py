"""Experiment runner: one subcommand per construct, JSON reports, CSV tables,
SVG decay plots.

Report layout: every top-level key except "timing" is deterministic for a
fixed config and seed, and each verdict records {value, op, threshold, pass}
so it can be re-checked offline from the report alone.  Exit codes: 0 all
verdicts pass, 1 input or config error, 2 quantitative failure.
"""

import argparse
import csv
import datetime
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .acceptance import CRITERIA, _py, run_all
from .algebra import builtin_group, builtin_group_names, load_group
from .bch import bch_series, compile_group_law, inverse, multiply
from .calculus import LipschitzMap, area_check, gen_fixture, lifted_circle_map
from .errors import EmptyProfile, NilgeomError, UnknownFixture
from .measures import (
    blowup_test,
    cone_excess_profile,
    default_dictionary,
    density_profile,
    fit_tangent,
    geometric_scales,
    lipschitz_cover,
    tube_bound_check,
)
from .norms import default_norm, make_norm


# -- config and report ---------------------------------------------------------


@dataclass
class ExperimentConfig:
    command: str
    group: str = None
    norm: str = "default"
    fixture: str = None
    fixture_params: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    seed: int = 0
    out: str = None

    def spec_dict(self):
        return _py(asdict(self))

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class Report:
    config: ExperimentConfig
    results: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)

    def add_verdict(self, name, value, op, threshold):
        ok = {
            "<=": lambda v, t: v <= t,
            ">=": lambda v, t: v >= t,
            "in": lambda v, t: t[0] <= v <= t[1],
            "==": lambda v, t: v == t,
        }[op](value, threshold)
        self.verdicts.append(
            {
                "name": name,
                "value": _py(value),
                "op": op,
                "threshold": _py(threshold),
                "pass": bool(ok),
            }
        )
        return ok

    @property
    def passed(self):
        return all(v["pass"] for v in self.verdicts)

    def payload(self, elapsed):
        return {
            "command": self.config.command,
            "config": self.config.spec_dict(),
            "results": _py(self.results),
            "verdicts": self.verdicts,
            "passed": self.passed,
            "version": __version__,
            # the one nondeterministic field, kept separate so reports can be
            # compared byte-for-byte after dropping it
            "timing": {
                "written": datetime.datetime.now(datetime.timezone.utc).isoformat(),
                "elapsed_seconds": elapsed,
            },
        }

    def write(self, out_dir, elapsed):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{self.config.command}.json"
        path.write_text(
            json.dumps(self.payload(elapsed), sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
        return path


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# -- plots -----------------------------------------------------------------------


def plot_profile(profile, path):
    """Log-log decay plot of a profile, one series per recorded statistic."""
    series = [
        (name, col)
        for name, col in profile.columns().items()
        if name != "scale" and col is not None
    ]
    if len(profile.scales) == 0 or not series:
        raise EmptyProfile("nothing to plot: profile has no statistics")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    for name, vals in series:
        vals = np.maximum(np.asarray(vals, float), 1e-16)  # log-axis floor
        ax.plot(profile.scales, vals, marker="o", label=name)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("scale r")
    ax.set_ylabel("statistic")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


# -- shared loading --------------------------------------------------------------


def _load_group_arg(value):
    if value in builtin_group_names():
        return builtin_group(value)
    try:
        return load_group(value)
    except (NilgeomError, OSError, ValueError) as exc:
        raise ValueError(f"cannot load group from {value!r}: {exc}") from exc


def _load_norm(alg, name):
    if name in (None, "default"):
        return default_norm(alg)
    return make_norm(alg, name, samples=200000)


def _load_fixture(cfg, default_n=None):
    params = dict(cfg.fixture_params or {})
    if cfg.group is not None:
        params.setdefault("alg", _load_group_arg(cfg.group))
    if default_n is not None:
        params.setdefault("n", default_n)
    return gen_fixture(cfg.fixture, params, seed=cfg.seed)


_AREA_MAPS = {
    "horizontal-segment": lambda: (
        LipschitzMap(
            builtin_group("heisenberg"),
            1,
            lambda t: np.concatenate([t, np.zeros((len(t), 2))], axis=1),
            [[-1.0, 1.0]],
            lipschitz=1.0,
        )
    ),
    "linear-det2": lambda: (
        LipschitzMap(
            builtin_group("abelian2"),
            2,
            lambda t: t @ np.array([[2.0, 0.0], [1.0, 1.0]]),
            [[-1.0, 1.0], [-1.0, 1.0]],
            lipschitz=3.0,
        )
    ),
    "lifted-curve": lambda: lifted_circle_map(builtin_group("heisenberg")),
}


# -- commands ---------------------------------------------------------------------


def cmd_check_group(cfg):
    alg = _load_group_arg(cfg.group or "heisenberg")
    rep = Report(cfg)
    rng = np.random.default_rng(cfg.seed)
    n = int(cfg.params.get("n", 2000))
    x, y, z = (rng.uniform(-1.5, 1.5, (n, alg.q)) for _ in range(3))
    assoc = float(
        np.max(
            np.abs(
                multiply(alg, multiply(alg, x, y), z)
                - multiply(alg, x, multiply(alg, y, z))
            )
        )
    )
    inv = float(np.max(np.abs(multiply(alg, x, inverse(x)))))
    rep.results = {
        "name": alg.name,
        "dimension": alg.q,
        "step": alg.step,
        "layers": list(alg.layer_dims),
        "n_triples": n,
        "associativity": assoc,
        "inverse": inv,
    }
    rep.add_verdict("associativity", assoc, "<=", 1e-9)
    rep.add_verdict("inverse", inv, "<=", 1e-9)
    return rep


def cmd_compile_law(cfg):
    alg = _load_group_arg(cfg.group or "heisenberg")
    rep = Report(cfg)
    law = compile_group_law(alg)
    rng = np.random.default_rng(cfg.seed)
    n = int(cfg.params.get("n", 500))
    x, y = rng.uniform(-1.5, 1.5, (2, n, alg.q))
    resid = float(np.max(np.abs(law.evaluate(x, y) - bch_series(alg, x, y))))
    rep.results = {
        "name": alg.name,
        "n_terms": law.n_terms,
        "n_pairs": n,
        "compiled_vs_series": resid,
    }
    rep.add_verdict("compiled_vs_series", resid, "<=", 1e-12)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(
            out / "compile-law-terms.csv",
            ["coordinate", "n_monomials"],
            [[m + 1, len(terms)] for m, terms in enumerate(law.terms)],
        )
    return rep


def cmd_grass_net(cfg):
    from .grassmann import grass_net

    alg = _load_group_arg(cfg.group or "heisenberg")
    norm = _load_norm(alg, cfg.norm)
    rep = Report(cfg)
    k = int(cfg.params.get("k", 1))
    eps = float(cfg.params.get("eps", 0.3))
    net = grass_net(alg, norm, k, eps, seed=cfg.seed)
    rep.results = {
        "k": k,
        "eps": eps,
        "n_subgroups": len(net),
        "frames": [V.frame_h1.tolist() for V in net],
    }
    rep.add_verdict("n_subgroups", len(net), ">=", 1)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        rows = [[i] + list(np.asarray(V.frame_h1).ravel()) for i, V in enumerate(net)]
        width = max(len(r) for r in rows) - 1
        write_csv(
            out / "grass-net.csv",
            ["index"] + [f"frame_{j}" for j in range(width)],
            rows,
        )
    return rep


def cmd_cg_estimate(cfg):
    from .grassmann import estimate_cG, grass_net

    alg = _load_group_arg(cfg.group or "heisenberg")
    norm = _load_norm(alg, cfg.norm)
    rep = Report(cfg)
    k = int(cfg.params.get("k", 1))
    eps = float(cfg.params.get("eps", 0.4))
    samples = int(cfg.params.get("samples", 20000))
    net = grass_net(alg, norm, k, eps, seed=7)
    consts = estimate_cG(alg, norm, net, samples=samples, seed=cfg.seed)
    rep.results = {
        "k": k,
        "eps": eps,
        "n_subgroups": len(net),
        **consts.spec_dict(),
    }
    rep.add_verdict("c_G_hat_above_zero", float(consts.c_G_hat), ">=", 1e-12)
    rep.add_verdict("c_G_hat_below_one", float(consts.c_G_hat), "<=", 1.0 - 1e-12)
    rep.add_verdict("min_chain_slack", float(consts.min_slack), ">=", 0.0)
    return rep


def cmd_gen_fixture(cfg):
    rep = Report(cfg)
    if cfg.fixture is None:
        raise UnknownFixture("gen-fixture needs --fixture NAME")
    mu = _load_fixture(cfg)
    rep.results = {
        "fixture": cfg.fixture,
        "n_points": len(mu),
        "k": mu.k,
        "mass": float(mu.weights.sum()),
        "provenance": mu.provenance,
        "meta": _py(mu.meta),
    }
    rep.add_verdict("n_points", len(mu), ">=", 1)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        mu.save(out / f"{cfg.fixture}.json")
        rep.results["written"] = f"{cfg.fixture}.json"
    return rep


def _pick_index(mu, cfg, rng):
    if "index" in cfg.params:
        return int(cfg.params["index"])
    return int(rng.integers(len(mu) // 4, 3 * len(mu) // 4))


def cmd_density(cfg):
    if cfg.fixture is None:
        cfg.fixture = "horizontal-segment"
    mu = _load_fixture(cfg, default_n=20000)
    norm = _load_norm(mu.alg, cfg.norm)
    rep = Report(cfg)
    k = mu.k
    radii = geometric_scales(
        float(cfg.params.get("r0", 0.1)), int(cfg.params.get("n_scales", 5))
    )
    n_pts = int(cfg.params.get("points", 40))
    rng = np.random.default_rng(cfg.seed)
    idx = rng.choice(len(mu), size=min(n_pts, len(mu)), replace=False)
    sups = np.array(
        [
            density_profile(mu, norm, mu.points[i], k, radii).meta["window_sup"]
            for i in idx
        ]
    )
    lo, hi = 2.0**-k * 0.9, 1.1
    frac = float(np.mean((sups >= lo) & (sups <= hi)))
    rep.results = {
        "fixture": cfg.fixture,
        "k": k,
        "radii": radii.tolist(),
        "n_points": len(idx),
        "window_sup_min": float(sups.min()),
        "window_sup_max": float(sups.max()),
        "bounds": [lo, hi],
        "pass_fraction": frac,
    }
    rep.add_verdict("density_pass_fraction", frac, ">=", 0.90)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(
            out / "density.csv",
            ["point_index", "window_sup"],
            [[int(i), float(s)] for i, s in zip(idx, sups)],
        )
    return rep


def cmd_tangent_fit(cfg):
    from .grassmann import grass_net, make_horizontal, rho

    if cfg.fixture is None:
        cfg.fixture = "lifted-curve"
    mu = _load_fixture(cfg, default_n=20000)
    norm = _load_norm(mu.alg, cfg.norm)
    rep = Report(cfg)
    rng = np.random.default_rng(cfg.seed)
    i = _pick_index(mu, cfg, rng)
    s = float(cfg.params.get("s", 0.2))
    eps = float(cfg.params.get("eps", 0.3))
    scales = geometric_scales(
        float(cfg.params.get("r0", 0.2)), int(cfg.params.get("n_scales", 5))
    )
    net = grass_net(mu.alg, norm, mu.k, eps, seed=11)
    V, prof = fit_tangent(mu, norm, mu.points[i], mu.k, net, s, scales)
    rep.results = {
        "fixture": cfg.fixture,
        "point_index": i,
        "s": s,
        "net_eps": eps,
        "n_net": len(net),
        "scales": scales.tolist(),
        "fitted_frame": V.frame_h1.tolist(),
        "excess_profile": prof.excess.tolist(),
    }
    if "tangent" in mu.meta:
        ref = make_horizontal(mu.alg, [mu.meta["tangent"]])
        rep.results["rho_to_reference"] = float(rho(norm, V, ref))
    rep.add_verdict(
        "excess_final",
        float(prof.excess[-1]),
        "<=",
        float(cfg.params.get("excess_tol", 0.05)),
    )
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        prof.to_csv(out / "tangent-fit.csv")
        plot_profile(prof, out / "tangent-fit.svg")
    return rep


def _curve_tangent(mu, i):
    """Analytic tangent direction of the lifted-curve fixture at sample i."""
    u0 = mu.meta.get("u0", 0.0)
    u1 = mu.meta.get("u1", 1.5 * np.pi)
    u = u0 + (u1 - u0) * i / (len(mu) - 1)
    return [-np.sin(u), np.cos(u), 0.0]


def _reference_subgroup(mu, cfg, i, norm, r0):
    from .grassmann import grass_net, make_horizontal

    if mu.meta.get("fixture") == "lifted-curve":
        return make_horizontal(mu.alg, [_curve_tangent(mu, i)]), "curve-parametrization"
    if "tangent" in mu.meta:
        tangent = list(mu.meta["tangent"])
        tangent += [0.0] * (mu.alg.q - len(tangent))
        return make_horizontal(mu.alg, [tangent]), "fixture-reference"
    net = grass_net(mu.alg, norm, mu.k, 0.3, seed=11)
    V, _ = fit_tangent(
        mu, norm, mu.points[i], mu.k, net, 0.2, geometric_scales(max(r0, 0.25), 5)
    )
    return V, "fitted"


def cmd_blowup(cfg):
    if cfg.fixture is None:
        cfg.fixture = "lifted-curve"
    default_n = 320000 if cfg.fixture == "lifted-curve" else None
    mu = _load_fixture(cfg, default_n=default_n)
    norm = _load_norm(mu.alg, cfg.norm)
    rep = Report(cfg)
    rng = np.random.default_rng(cfg.seed)
    i = _pick_index(mu, cfg, rng)
    r0 = float(cfg.params.get("r0", 0.1))
    n_scales = int(cfg.params.get("n_scales", 8))
    scales = r0 * 2.0 ** -np.arange(n_scales)
    V, v_source = _reference_subgroup(mu, cfg, i, norm, r0)
    dic = default_dictionary(norm, spacing=float(cfg.params.get("dict_spacing", 0.25)))
    prof = blowup_test(
        mu,
        norm,
        mu.points[i],
        mu.k,
        V,
        scales,
        dic=dic,
        normalized=bool(cfg.params.get("normalized", False)),
        grid=int(cfg.params.get("grid", 512)),
    )
    b = prof.blowup
    worst_step = float(np.max(b[1:] / b[:-1])) if len(b) > 1 else 0.0
    ratio = float(b[-1] / b[0]) if b[0] > 0 else 0.0
    rep.results = {
        "fixture": cfg.fixture,
        "point_index": i,
        "r0": r0,
        "scales": scales.tolist(),
        "reference_subgroup": v_source,
        "frame": V.frame_h1.tolist(),
        "discrepancies": b.tolist(),
        "worst_step_ratio": worst_step,
        "final_over_initial": ratio,
    }
    rep.add_verdict("worst_step_ratio", worst_step, "<=", 1.1)
    rep.add_verdict("final_over_initial", ratio, "<=", 0.05)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        prof.to_csv(out / "blowup.csv")
        plot_profile(prof, out / "blowup.svg")
    return rep


def cmd_tube_check(cfg):
    from .grassmann import make_horizontal

    if cfg.fixture is None:
        cfg.fixture = "four-corner-cantor"
    mu = _load_fixture(cfg)
    norm = _load_norm(mu.alg, cfg.norm)
    rep = Report(cfg)
    s = float(cfg.params.get("s", 0.03))
    trials = int(cfg.params.get("trials", 1000))
    frame = cfg.params.get("frame", [1.0] + [0.0] * (mu.alg.q - 1))
    V = make_horizontal(mu.alg, [frame])
    report = tube_bound_check(
        mu,
        norm,
        V,
        s,
        delta_scale=float(cfg.params.get("delta_scale", 0.5)),
        trials=trials,
        seed=cfg.seed,
    )
    rep.results = {"fixture": cfg.fixture, **_py(report)}
    rep.add_verdict("min_tube_slack", float(report["min_tube_slack"]), ">=", 0.0)
    rep.add_verdict(
        "density_window_sup",
        float(report["density_window_sup"]),
        "<=",
        float(report["density_bound"]),
    )
    return rep


def cmd_area_check(cfg):
    if cfg.fixture is None:
        cfg.fixture = "horizontal-segment"
    if cfg.fixture not in _AREA_MAPS:
        raise UnknownFixture(
            f"no area map named {cfg.fixture!r}; choose from {sorted(_AREA_MAPS)}"
        )
    f = _AREA_MAPS[cfg.fixture]()
    norm = _load_norm(f.alg, cfg.norm)
    rep = Report(cfg)
    lhs, rhs, ratio = area_check(f, norm)
    rep.results = {
        "fixture": cfg.fixture,
        "k": f.k,
        "lhs": float(lhs),
        "rhs": float(rhs),
        "ratio": float(ratio),
    }
    rep.add_verdict("area_ratio", float(ratio), "in", [0.9, 1.1])
    return rep


def cmd_lipschitz_cover(cfg):
    from .grassmann import make_horizontal

    if cfg.fixture is None:
        cfg.fixture = "tilted-graph"
    mu = _load_fixture(cfg, default_n=1500)
    norm = _load_norm(mu.alg, cfg.norm)
    rep = Report(cfg)
    s = float(cfg.params.get("s", 0.5))
    axis = cfg.params.get("axis") or mu.meta.get("graph_axis")
    if axis is None:
        axis = [1.0] + [0.0] * (mu.alg.first_layer_dim - 1)
    axis = list(axis) + [0.0] * (mu.alg.q - len(axis))
    T = make_horizontal(mu.alg, [axis])
    report = lipschitz_cover(mu, norm, T, s, seed=cfg.seed)
    rep.results = {"fixture": cfg.fixture, **_py(report)}
    rep.add_verdict(
        "lipschitz_constant",
        float(report["lipschitz_constant"]),
        "<=",
        1.0 / s + 1e-6,
    )
    return rep


def cmd_equiv_suite(cfg):
    if cfg.fixture is None:
        cfg.fixture = "lifted-curve"
    if cfg.fixture == "lifted-curve":
        mu = _load_fixture(cfg, default_n=320000)
        r0_default, n_scales_default = 0.1, 8
    else:
        mu = _load_fixture(cfg)
        r0_default, n_scales_default = 0.5, 5
    r0 = float(cfg.params.get("r0", r0_default))
    n_scales = int(cfg.params.get("n_scales", n_scales_default))
    unrect_expected = bool(mu.meta.get("purely_unrectifiable", False))
    norm = _load_norm(mu.alg, cfg.norm)
    rep = Report(cfg)
    rng = np.random.default_rng(cfg.seed)
    n_points = int(cfg.params.get("points", 3))
    lo, hi = len(mu) // 4, 3 * len(mu) // 4
    idx = sorted(int(v) for v in rng.integers(lo, hi, size=n_points))
    scales = r0 * 2.0 ** -np.arange(n_scales)
    excess_scales = geometric_scales(max(r0, 0.2), 5)
    dic = default_dictionary(norm, spacing=0.25)
    decay_ratio = 0.25
    excess_tol = 0.05
    points = []
    for i in idx:
        p = mu.points[i]
        V, v_source = _reference_subgroup(mu, cfg, i, norm, r0)
        plain = blowup_test(mu, norm, p, mu.k, V, scales, dic=dic, grid=512).blowup
        normed = blowup_test(
            mu, norm, p, mu.k, V, scales, dic=dic, grid=512, normalized=True
        ).blowup
        excess = cone_excess_profile(mu, norm, p, V, 0.2, excess_scales, mu.k).excess
        points.append(
            {
                "point_index": i,
                "reference_subgroup": v_source,
                "blowup": plain.tolist(),
                "blowup_normalized": normed.tolist(),
                "excess": excess.tolist(),
                "blowup_decays": bool(plain[-1] <= decay_ratio * plain[0]),
                "normalized_decays": bool(normed[-1] <= decay_ratio * normed[0]),
                "excess_decays": bool(excess[-1] <= excess_tol),
            }
        )
    n_decay = sum(
        d["blowup_decays"] + d["normalized_decays"] + d["excess_decays"]
        for d in points
    )
    n_total = 3 * len(points)
    if n_decay == n_total:
        verdict = "rectifiable-consistent"
    elif n_decay == 0:
        verdict = "unrectifiable-consistent"
    else:
        verdict = "mixed"
    expected = "unrectifiable-consistent" if unrect_expected else "rectifiable-consistent"
    rep.results = {
        "fixture": cfg.fixture,
        "r0": r0,
        "scales": scales.tolist(),
        "excess_scales": excess_scales.tolist(),
        "decay_ratio": decay_ratio,
        "excess_tol": excess_tol,
        "points": points,
        "n_decayed": int(n_decay),
        "n_diagnostics": int(n_total),
        "verdict": verdict,
        "expected": expected,
    }
    rep.add_verdict("diagnostics_consistent", int(verdict == expected), ">=", 1)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        rows = [
            [d["point_index"], j, float(r), d["blowup"][j], d["blowup_normalized"][j]]
            for d in points
            for j, r in enumerate(scales)
        ]
        write_csv(
            out / "equiv-suite.csv",
            ["point_index", "scale_index", "scale", "blowup", "blowup_normalized"],
            rows,
        )
    return rep


def cmd_suite(cfg):
    rep = Report(cfg)
    if cfg.params.get("list"):
        rep.results = {
            "criteria": [{"cid": c, "name": name} for c, name, _ in CRITERIA]
        }
        rep.add_verdict("n_criteria", len(CRITERIA), "==", 12)
        return rep
    quick = bool(cfg.params.get("quick", False))
    results = run_all(quick=quick)
    rep.results = {
        "profile": "quick" if quick else "full",
        "criteria": [r.spec_dict() for r in results],
        "lines": [r.line() for r in results],
    }
    for r in results:
        rep.add_verdict(
            f"criterion_{r.cid:02d}_{r.name.replace(' ', '_')}",
            int(r.passed),
            ">=",
            1,
        )
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(
            out / "suite.csv",
            ["cid", "name", "passed", "elapsed_seconds"],
            [[r.cid, r.name, r.passed, f"{r.elapsed:.3f}"] for r in results],
        )
    return rep


_COMMANDS = {
    "check-group": cmd_check_group,
    "compile-law": cmd_compile_law,
    "grass-net": cmd_grass_net,
    "cg-estimate": cmd_cg_estimate,
    "tangent-fit": cmd_tangent_fit,
    "blowup": cmd_blowup,
    "density": cmd_density,
    "tube-check": cmd_tube_check,
    "area-check": cmd_area_check,
    "lipschitz-cover": cmd_lipschitz_cover,
    "gen-fixture": cmd_gen_fixture,
    "equiv-suite": cmd_equiv_suite,
    "suite": cmd_suite,
}


def _parse_kv(pairs):
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ValueError(f"expected key=value, got {pair!r}")
        key, val = pair.split("=", 1)
        try:
            out[key] = json.loads(val)
        except json.JSONDecodeError:
            out[key] = val
    return out


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nilgeom",
        description="numerical geometric measure theory on homogeneous groups",
    )
    parser.add_argument("--version", action="version", version=f"nilgeom {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--group", default=None, help="builtin name or JSON group file")
        p.add_argument("--norm", default="default", help="default, koranyi, or weighted-max")
        p.add_argument("--fixture", default=None, help="fixture name for measure commands")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="directory for report, CSV and SVG artifacts")
        p.add_argument(
            "--fixture-param",
            action="append",
            metavar="KEY=VALUE",
            help="fixture parameter (JSON value), repeatable",
        )
        p.add_argument(
            "--param",
            action="append",
            metavar="KEY=VALUE",
            help="command parameter (JSON value), repeatable",
        )
        if name == "suite":
            p.add_argument("--list", action="store_true", help="print criteria identifiers and exit")
            p.add_argument("--quick", action="store_true", help="reduced sample counts")
    return parser


def run(args):
    """Parsed-args entry used by main(); returns the process exit code."""
    try:
        params = _parse_kv(args.param)
        if args.command == "suite":
            params["list"] = bool(args.list)
            params["quick"] = bool(args.quick)
        cfg = ExperimentConfig(
            command=args.command,
            group=args.group,
            norm=args.norm,
            fixture=args.fixture,
            fixture_params=_parse_kv(args.fixture_param),
            params=params,
            seed=args.seed,
            out=args.out,
        )
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    t0 = time.perf_counter()
    try:
        rep = _COMMANDS[cfg.command](cfg)
    except (NilgeomError, OSError, ValueError) as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - t0
    if cfg.command == "suite" and cfg.params.get("list"):
        for row in rep.results["criteria"]:
            print(f"{row['cid']:2d}  {row['name']}")
        return 0
    if cfg.command == "suite":
        for line in rep.results["lines"]:
            print(line)
    if cfg.out:
        path = rep.write(cfg.out, elapsed)
        print(f"report: {path}")
    for v in rep.verdicts:
        tag = "PASS" if v["pass"] else "FAIL"
        print(f"[{tag}] {v['name']}: {_fmt(v['value'])} {v['op']} {_fmt(v['threshold'])}")
    return 0 if rep.passed else 2


def _fmt(t):
    if isinstance(t, list):
        return "[" + ", ".join(_fmt(v) for v in t) + "]"
    if isinstance(t, float):
        return f"{t:.6g}"
    return str(t)


def main(argv=None):
    parser = build_parser()
    return run(parser.parse_args(argv))


def entrypoint():
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
