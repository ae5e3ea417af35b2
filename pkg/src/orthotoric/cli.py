"""Command-line front end: TOML problem files in, JSON reports out.

Commands
    validate-polytope   rational Delzant conditions of a polytope file
    build-orthotoric    simplex construction, dual pairing, canonical metric
    check-compactify    endpoint conditions and curvature pattern of profiles
    solve-wbf           multistart solve of the weakly Bochner-flat system
    solve-extremal      linear construction of the order-1 extremal profile
    verify-curvature    finite-difference curvature checks on a scene
    spectrum            momentum endomorphism eigenvalues on a scene
    report-all          battery over the bundled corpus, coverage audited

Reports carry rationals as "p/q" strings and floats as decimal strings with
17 significant digits, so identical configurations produce byte-identical
output (pass --no-timestamp to drop the one varying field).  Exit codes:
0 all checks passed, 1 some check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .exact import (
    Polynomial,
    count_roots_open,
    elem_sym,
    gauss_legendre,
    hermite_normal_form,
    int_det,
    poly_integrate_interval,
    rational_str,
    real_roots,
    to_rational,
)
from .geometry import (
    CalabiData,
    MetricField,
    curvature,
    eval_line_bundle_metric,
    eval_metric,
    eval_orthotoric_metric,
    line_bundle_data,
    momentum_spectrum,
    orthotoric_data,
    sample_points,
    verify_einstein,
    verify_extremal,
    verify_hamiltonian,
)
from .polytopes import (
    RationalDelzantPolytope,
    RationalLattice,
    canonical_hessian,
    check_toric_boundary,
    dual_pairing_check,
    ke_surface_polytope,
    orthotoric_simplex,
    verify_delzant,
)
from .profiles import (
    ThetaProfile,
    WeightedProjectiveTag,
    bochner_flat_profile,
    check_orthocompact,
    fubini_study_profile,
    ke_surface_profiles,
    orthotoric_H,
    profile_labels,
    sigma_to_roots,
)
from .wbf import (
    LineBundleProblem,
    blowdown_problem,
    bochner_flat_check,
    check_integrality,
    check_sign_conditions,
    cp2xcp3_problem,
    extremal_profile_l1,
    h_eval,
    h_exact,
    koiso_sakane_problem,
    solve_B,
    solve_blowdown,
    solve_wbf,
)

VERSION = "0.1.0"

COMMANDS = (
    "validate-polytope",
    "build-orthotoric",
    "check-compactify",
    "solve-wbf",
    "solve-extremal",
    "verify-curvature",
    "spectrum",
    "report-all",
)

# every operation the library exports; report-all must exercise all of them
ALL_OPS = frozenset(
    {
        "elem_sym",
        "poly_integrate_interval",
        "gauss_legendre",
        "hermite_normal_form",
        "real_roots",
        "verify_delzant",
        "orthotoric_simplex",
        "dual_pairing_check",
        "ke_surface_polytope",
        "canonical_hessian",
        "check_toric_boundary",
        "check_orthocompact",
        "fubini_study_profile",
        "bochner_flat_profile",
        "ke_surface_profiles",
        "orthotoric_H",
        "sigma_to_roots",
        "eval_metric",
        "eval_orthotoric_metric",
        "eval_line_bundle_metric",
        "curvature",
        "verify_hamiltonian",
        "verify_einstein",
        "verify_extremal",
        "momentum_spectrum",
        "h_exact",
        "solve_B",
        "solve_wbf",
        "check_sign_conditions",
        "check_integrality",
        "solve_blowdown",
        "extremal_profile_l1",
        "bochner_flat_check",
        "run",
    }
)

RECORDED_OPS: set = set()


def _record(*names: str) -> None:
    RECORDED_OPS.update(names)


DEFAULT_TOLERANCES = {
    "residual": 1e-10,
    "newton": 1e-12,
    "agree": 1e-10,
    "roundtrip": 1e-8,
    "boundary": 1e-8,
    "hamiltonian": 1e-3,
    "einstein": 1e-3,
    "extremal": 1e-3,
    "scal": 1e-3,
    "spectrum": 1e-8,
}


class UsageError(Exception):
    """Bad flags or bad input files: exit code 2, message on stderr."""


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    output_path: str | None = None
    seed: int | None = None
    samples: int | None = None
    tolerances: dict = dc_field(default_factory=dict)
    no_timestamp: bool = False
    preset: str | None = None

    def tol(self, name: str) -> float:
        return self.tolerances[name]


# ---------------------------------------------------------------------------
# argument and file parsing
# ---------------------------------------------------------------------------


def _extract_tolerances(argv: list) -> tuple:
    """Split off --tol.<name> flags, which argparse cannot declare."""
    tols = dict(DEFAULT_TOLERANCES)
    rest = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--tol."):
            body = tok[len("--tol.") :]
            if "=" in body:
                name, value = body.split("=", 1)
            else:
                name = body
                if i + 1 >= len(argv):
                    raise UsageError(f"--tol.{name} needs a value")
                i += 1
                value = argv[i]
            if name not in DEFAULT_TOLERANCES:
                raise UsageError(
                    f"unknown tolerance {name!r}; known: {', '.join(sorted(DEFAULT_TOLERANCES))}"
                )
            try:
                tols[name] = float(value)
            except ValueError:
                raise UsageError(f"--tol.{name} needs a float, got {value!r}") from None
        else:
            rest.append(tok)
        i += 1
    return tols, rest


def parse_args(argv: list) -> RunConfig:
    tols, rest = _extract_tolerances(list(argv))
    parser = argparse.ArgumentParser(
        prog="orthotoric",
        description="construct and numerically verify explicit Kahler metric families",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", help="input TOML file (directory for report-all)")
    parser.add_argument("--output", help="write the JSON report here instead of stdout")
    parser.add_argument("--seed", type=int, help="sampling seed (default 0)")
    parser.add_argument("--samples", type=int, help="sample point count (default 10)")
    parser.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")
    parser.add_argument("--preset", help="named problem, e.g. 'koiso-sakane 2 1' or 'cp2xcp3'")
    ns = parser.parse_args(rest)
    return RunConfig(
        command=ns.command,
        input_path=ns.input,
        output_path=ns.output,
        seed=ns.seed,
        samples=ns.samples,
        tolerances=tols,
        no_timestamp=ns.no_timestamp,
        preset=ns.preset,
    )


def _load_toml(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read input file: {exc}") from None
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"invalid TOML in {path}: {exc}") from None


def _check_keys(table: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise UsageError(f"unknown keys in {where}: {', '.join(unknown)}")


def _need(table: dict, key: str, where: str):
    if key not in table:
        raise UsageError(f"{where} needs the key {key!r}")
    return table[key]


def _rat(value, where: str) -> Fraction:
    if isinstance(value, float):
        raise UsageError(f"{where}: rational values must be strings like '3/4', not floats")
    try:
        return to_rational(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"{where}: {exc}") from None


def _rat_list(values, where: str) -> list:
    if not isinstance(values, list):
        raise UsageError(f"{where} must be an array")
    return [_rat(v, where) for v in values]


def _float_any(value, where: str) -> float:
    if isinstance(value, bool):
        raise UsageError(f"{where} must be a number")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return float(_rat(value, where))
    raise UsageError(f"{where} must be a number or rational string")


def _resolved(config: RunConfig, table: dict | None, name: str, default: int) -> int:
    flag = getattr(config, name)
    if flag is not None:
        return int(flag)
    if table and name in table:
        return int(table[name])
    return default


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _ser(value):
    """Deterministic JSON form: rationals 'p/q', floats 17 significant digits."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return rational_str(value)
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, Polynomial):
        return [_ser(c) for c in value.coeffs]
    if isinstance(value, np.ndarray):
        return [_ser(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _ser(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_ser(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _write_report(config: RunConfig, checks: list, payload: dict) -> int:
    passed = all(c["pass"] for c in checks)
    report = {
        "tool": "orthotoric",
        "version": VERSION,
        "command": config.command,
        "config": {
            "input": config.input_path,
            "output": config.output_path,
            "preset": config.preset,
            "seed": config.seed,
            "samples": config.samples,
            "tolerances": config.tolerances,
            "no_timestamp": config.no_timestamp,
        },
        "checks": checks,
        "passed": passed,
        "result": payload,
    }
    if not config.no_timestamp:
        report["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    text = json.dumps(_ser(report), indent=2, sort_keys=True) + "\n"
    if config.output_path:
        try:
            Path(config.output_path).write_text(text)
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    good = sum(1 for c in checks if c["pass"])
    print(
        f"{config.command}: {'PASS' if passed else 'FAIL'} ({good}/{len(checks)} checks)",
        file=sys.stderr,
    )
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# input builders
# ---------------------------------------------------------------------------

_POLYTOPE_KEYS = {"kind", "preset", "p", "q", "normals", "offsets", "lattice", "expect_integral", "check_boundary"}


def _load_polytope(table: dict) -> RationalDelzantPolytope:
    _check_keys(table, _POLYTOPE_KEYS, "polytope file")
    preset = table.get("preset")
    try:
        if preset == "cp2":
            return RationalDelzantPolytope([[1, 0], [0, 1], [-1, -1]], [0, 0, 1])
        if preset == "square":
            return RationalDelzantPolytope([[1, 0], [0, 1], [-1, 0], [0, -1]], [0, 0, 1, 1])
        if preset == "ke-surface":
            _record("ke_surface_polytope")
            return ke_surface_polytope(int(_need(table, "p", "preset ke-surface")), int(_need(table, "q", "preset ke-surface")))
        if preset is not None:
            raise UsageError(f"unknown polytope preset {preset!r}")
        normals = [_rat_list(u, "normals") for u in _need(table, "normals", "polytope file")]
        offsets = _rat_list(_need(table, "offsets", "polytope file"), "offsets")
        lattice = None
        if "lattice" in table:
            lattice = RationalLattice.from_integer_basis([[int(x) for x in col] for col in table["lattice"]])
        return RationalDelzantPolytope(normals, offsets, lattice)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad polytope data: {exc}") from None


_PROFILE_KEYS = {"kind", "preset", "betas", "c", "weights", "beta", "p", "q", "intervals", "thetas"}


def _load_profile(table: dict, where: str = "profile file") -> tuple:
    """(profile, extras) from a profile table; extras carry preset by-products."""
    _check_keys(table, _PROFILE_KEYS, where)
    preset = table.get("preset")
    try:
        if preset == "fubini-study":
            betas = _rat_list(_need(table, "betas", where), "betas")
            c = _rat(_need(table, "c", where), "c")
            _record("fubini_study_profile")
            return fubini_study_profile(betas, c), {"betas": betas, "c": c}
        if preset == "bochner-flat":
            tag = WeightedProjectiveTag([int(w) for w in _need(table, "weights", where)])
            c = _rat(_need(table, "c", where), "c")
            beta = _rat(table.get("beta", 0), "beta")
            _record("bochner_flat_profile")
            profile, betas = bochner_flat_profile(tag, c, beta)
            return profile, {"betas": betas, "labels": tag.labels, "c": c}
        if preset == "ke-surface":
            _record("ke_surface_profiles")
            profile, big_c = ke_surface_profiles(int(_need(table, "p", where)), int(_need(table, "q", where)))
            return profile, {"C": big_c}
        if preset is not None:
            raise UsageError(f"unknown profile preset {preset!r}")
        intervals = [(_rat(a, "intervals"), _rat(b, "intervals")) for a, b in _need(table, "intervals", where)]
        thetas = [Polynomial(_rat_list(cs, "thetas")) for cs in _need(table, "thetas", where)]
        single = len(thetas) > 0 and all(th.coeffs == thetas[0].coeffs for th in thetas)
        return ThetaProfile(intervals, thetas, single_theta=single), {}
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad profile data: {exc}") from None


_PROBLEM_KEYS = {
    "kind",
    "preset",
    "N",
    "d",
    "s",
    "blow_down",
    "projective",
    "degrees",
    "grid_step",
    "boundary_constant",
    "expect_roots",
}


def _problem_from_preset(name: str) -> tuple:
    tokens = name.split()
    if tokens and tokens[0] == "koiso-sakane":
        if len(tokens) != 3:
            raise UsageError("preset koiso-sakane needs two integers, e.g. 'koiso-sakane 2 1'")
        try:
            d, k = int(tokens[1]), int(tokens[2])
        except ValueError:
            raise UsageError("preset koiso-sakane needs two integers") from None
        try:
            return koiso_sakane_problem(d, k), [k, -k]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if tokens == ["cp2xcp3"]:
        return cp2xcp3_problem(), [1, -2]
    if tokens == ["blowdown"]:
        return blowdown_problem(), None
    raise UsageError(f"unknown preset {name!r}; known: 'koiso-sakane d k', 'cp2xcp3', 'blowdown'")


def _load_problem(config: RunConfig) -> tuple:
    """(problem, degrees, options) from --preset or the input file."""
    if config.preset and config.input_path:
        raise UsageError("give either --preset or --input, not both")
    if config.preset:
        problem, degrees = _problem_from_preset(config.preset)
        return problem, degrees, {}
    if not config.input_path:
        raise UsageError("solve-wbf needs --input or --preset")
    table = _load_toml(config.input_path)
    _check_keys(table, _PROBLEM_KEYS, "problem file")
    if "preset" in table:
        problem, degrees = _problem_from_preset(table["preset"])
    else:
        d = [int(v) for v in _need(table, "d", "problem file")]
        s = _rat_list(_need(table, "s", "problem file"), "s")
        if "N" in table and int(table["N"]) != len(d):
            raise UsageError("N disagrees with the length of d")
        blow_down = None
        if "blow_down" in table:
            blow_down = tuple((v or None) for v in table["blow_down"])
        projective = tuple(bool(v) for v in table["projective"]) if "projective" in table else None
        try:
            problem = LineBundleProblem(d=tuple(d), s=tuple(s), blow_down=blow_down, projective=projective)
        except (ValueError, TypeError) as exc:
            raise UsageError(f"bad problem data: {exc}") from None
        degrees = [int(v) for v in table["degrees"]] if "degrees" in table else None
    options = {}
    if "grid_step" in table:
        options["grid_step"] = float(table["grid_step"])
    if "boundary_constant" in table:
        options["boundary_constant"] = _rat(table["boundary_constant"], "boundary_constant")
    if "expect_roots" in table:
        options["expect_roots"] = int(table["expect_roots"])
    return problem, degrees, options


_SCENE_KEYS = {
    "kind",
    "model",
    "profile",
    "roots",
    "dims",
    "kappas",
    "F",
    "gauge",
    "box",
    "points",
    "samples",
    "seed",
    "checks",
    "expected_scalar",
    "expected_lambda",
    "fd_step",
}


def _load_scene(config: RunConfig):
    if not config.input_path:
        raise UsageError(f"{config.command} needs --input with a scene file")
    table = _load_toml(config.input_path)
    _check_keys(table, _SCENE_KEYS, "scene file")
    model = _need(table, "model", "scene file")
    profile = None
    try:
        if model == "orthotoric":
            profile, _ = _load_profile(_need(table, "profile", "scene file"), "scene profile")
            data = orthotoric_data(profile)
            eval_op = "eval_orthotoric_metric"
        elif model in ("line-bundle", "calabi"):
            etas = _rat_list(_need(table, "roots", "scene file"), "roots")
            dims = [int(v) for v in _need(table, "dims", "scene file")]
            kappas = [_float_any(v, "kappas") for v in _need(table, "kappas", "scene file")]
            f_entries = _need(table, "F", "scene file")
            if f_entries and not isinstance(f_entries[0], list):
                f_entries = [f_entries]
            fs = tuple(Polynomial(_rat_list(cs, "F")) for cs in f_entries)
            gauge = table.get("gauge", "radial")
            if model == "line-bundle":
                if len(fs) != 1:
                    raise UsageError("line-bundle scenes carry a single F")
                data = line_bundle_data(etas, dims, kappas, fs[0], gauge)
                eval_op = "eval_line_bundle_metric"
            else:
                from .geometry import BaseFactor

                box = (
                    tuple((_rat(a, "box"), _rat(b, "box")) for a, b in table["box"])
                    if "box" in table
                    else ((Fraction(-1), Fraction(1)),) * len(fs)
                )
                data = CalabiData(
                    ell=len(fs),
                    etas=tuple(etas),
                    factors=tuple(BaseFactor(d, k) for d, k in zip(dims, kappas)),
                    F=fs,
                    box=box,
                    gauge=gauge,
                )
                eval_op = "eval_metric"
        else:
            raise UsageError(f"unknown scene model {model!r}")
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad scene data: {exc}") from None
    field = MetricField(data, name=model)
    if "points" in table:
        pts = [np.asarray([float(x) for x in p], dtype=float) for p in table["points"]]
        for p in pts:
            if len(p) != field.n:
                raise UsageError(f"scene points must have {field.n} coordinates")
    else:
        samples = _resolved(config, table, "samples", 10)
        seed = _resolved(config, table, "seed", 0)
        pts = sample_points(data, samples, seed)
    return table, data, field, pts, eval_op, profile


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def _integer_columns(P: RationalDelzantPolytope) -> list:
    cols = []
    for u in P.normals:
        scale = 1
        for x in u:
            scale = scale * x.denominator // np.gcd(scale, x.denominator)
        cols.append([int(x * scale) for x in u])
    return [[cols[j][r] for j in range(len(cols))] for r in range(P.m)]


def handle_validate_polytope(config: RunConfig):
    if not config.input_path:
        raise UsageError("validate-polytope needs --input")
    table = _load_toml(config.input_path)
    P = _load_polytope(table)
    _record("verify_delzant")
    rep = verify_delzant(P)
    checks = [{"name": "rational-delzant", "pass": bool(rep.is_rational_delzant)}]
    if "expect_integral" in table:
        checks.append(
            {
                "name": "integral-delzant",
                "pass": rep.is_integral_delzant == bool(table["expect_integral"]),
                "value": rep.is_integral_delzant,
            }
        )
    _record("hermite_normal_form")
    H, _ = hermite_normal_form(_integer_columns(P))
    lead = [[H[r][c] for c in range(P.m)] for r in range(P.m)]
    payload = {
        "report": rep.to_dict(),
        "scaled_normal_lattice_index": abs(int_det(lead)),
    }
    if table.get("check_boundary"):
        _record("canonical_hessian")
        field = canonical_hessian(P)
        _record("check_toric_boundary")
        brep = check_toric_boundary(field, P, samples=3, tol=config.tol("boundary"))
        checks.append({"name": "toric-boundary", "pass": brep["pass"]})
        payload["boundary"] = brep
    return checks, payload


_ORTHOTORIC_KEYS = {"kind", "betas", "weights", "c", "samples", "seed"}


def handle_build_orthotoric(config: RunConfig):
    if not config.input_path:
        raise UsageError("build-orthotoric needs --input")
    table = _load_toml(config.input_path)
    _check_keys(table, _ORTHOTORIC_KEYS, "orthotoric file")
    betas = _rat_list(_need(table, "betas", "orthotoric file"), "betas")
    weights = [int(w) for w in _need(table, "weights", "orthotoric file")]
    c = _rat(_need(table, "c", "orthotoric file"), "c")
    try:
        _record("orthotoric_simplex")
        P = orthotoric_simplex(betas, weights, c)
        _record("dual_pairing_check")
        pairing_ok, pairing = dual_pairing_check(betas, c)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad orthotoric data: {exc}") from None
    _record("verify_delzant")
    rep = verify_delzant(P)
    _record("canonical_hessian")
    field = canonical_hessian(P)
    _record("check_toric_boundary")
    brep = check_toric_boundary(field, P, samples=3, tol=config.tol("boundary"))
    checks = [
        {"name": "rational-delzant", "pass": bool(rep.is_rational_delzant)},
        {"name": "dual-pairing", "pass": bool(pairing_ok)},
        {"name": "toric-boundary", "pass": brep["pass"]},
    ]
    payload = {
        "report": rep.to_dict(),
        "pairing": [[rational_str(v) for v in row] for row in pairing],
        "boundary": brep,
    }
    # the canonical metric of the unit-label simplex is the orthotoric metric
    # of the Fubini-Study profile; compare the two Hessians at random momenta
    if all(w == 1 for w in weights):
        _record("fubini_study_profile")
        profile = fubini_study_profile(betas, c)
        rng = np.random.default_rng(_resolved(config, table, "seed", 0))
        samples = _resolved(config, table, "samples", 10)
        bounds = profile.box_bounds_float()
        worst = 0.0
        worst_rt = 0.0
        for _ in range(samples):
            xi = np.array([a + (b - a) * rng.uniform(0.05, 0.95) for a, b in bounds])
            _record("elem_sym")
            sigma = elem_sym([Fraction(float(v)) for v in xi])
            _record("orthotoric_H")
            h_profile = orthotoric_H(profile, xi)
            h_canon = field.eval_float(np.array([float(s) for s in sigma]))
            worst = max(worst, float(np.abs(h_canon - h_profile).max()))
            _record("sigma_to_roots")
            back = sigma_to_roots(np.array([float(s) for s in sigma]), profile)
            worst_rt = max(worst_rt, float(np.abs(np.sort(back) - np.sort(xi)).max()))
        checks.append({"name": "canonical-agreement", "pass": worst <= config.tol("agree"), "residual": worst})
        checks.append({"name": "root-roundtrip", "pass": worst_rt <= config.tol("roundtrip"), "residual": worst_rt})
        payload["agreement_samples"] = samples
    return checks, payload


_COMPACTIFY_KEYS = _PROFILE_KEYS | {"c_alpha", "c_beta", "expect_bochner_flat"}


def handle_check_compactify(config: RunConfig):
    if not config.input_path:
        raise UsageError("check-compactify needs --input")
    table = _load_toml(config.input_path)
    _check_keys(table, _COMPACTIFY_KEYS, "profile file")
    profile, extras = _load_profile({k: v for k, v in table.items() if k in _PROFILE_KEYS})
    if "c_alpha" in table or "c_beta" in table:
        ca = _rat_list(_need(table, "c_alpha", "profile file"), "c_alpha")
        cb = _rat_list(_need(table, "c_beta", "profile file"), "c_beta")
    else:
        ca, cb = profile_labels(profile)
    _record("check_orthocompact")
    rep = check_orthocompact(profile, ca, cb)
    _record("bochner_flat_check")
    bf = bochner_flat_check(profile)
    checks = [{"name": "compactify", "pass": rep["pass"]}]
    if "expect_bochner_flat" in table:
        checks.append(
            {"name": "bochner-flat", "pass": bf == bool(table["expect_bochner_flat"]), "value": bf}
        )
    payload = {
        "profile": profile.to_dict(),
        "c_alpha": ca,
        "c_beta": cb,
        "compactify": rep,
        "bochner_flat": bf,
    }
    payload.update({k: v for k, v in extras.items()})
    return checks, payload


def _gl32_oracle(problem: LineBundleProblem, x: list) -> float:
    """|exact h - Gauss-Legendre(32) of the same integrand|, first factor."""
    _record("gauss_legendre")
    nodes, weights = gauss_legendre(32)
    xf = [float(v) for v in x]
    coeffs = np.array([1.0])
    for xa, da in zip(xf, problem.d):
        for _ in range(da):
            coeffs = np.convolve(coeffs, np.array([1.0, xa]))
    x0, s0 = xf[0], float(problem.s[0])
    coeffs = np.convolve(coeffs, np.array([x0 * x0 * s0 - x0, 1.0 - x0 * x0, x0 - x0 * x0 * s0]))
    quad = float(np.dot(weights, np.polynomial.polynomial.polyval(nodes, coeffs)))
    exact = float(h_eval(problem, x)[0])
    return abs(quad - exact)


def handle_solve_wbf(config: RunConfig):
    problem, degrees, options = _load_problem(config)
    payload = {
        "problem": {
            "d": list(problem.d),
            "s": list(problem.s),
            "blow_down": list(problem.blow_down),
            "projective": list(problem.projective),
        }
    }
    checks = []
    if any(v is not None for v in problem.blow_down):
        _record("solve_blowdown")
        try:
            bd = solve_blowdown(
                problem,
                boundary_constant=options.get("boundary_constant", 4),
                tol=config.tol("residual"),
            )
        except (ValueError, ArithmeticError) as exc:
            raise UsageError(f"blow-down solve failed: {exc}") from None
        checks.append({"name": "boundary-consistent", "pass": bd.consistent})
        checks.append({"name": "roots-found", "pass": len(bd.roots) >= 1, "count": len(bd.roots)})
        checks.append(
            {"name": "einstein-excluded", "pass": bd.f_at_minus_half != 0, "f_at_minus_half": bd.f_at_minus_half}
        )
        for i, sol in enumerate(bd.solutions):
            _record("check_integrality")
            integ = check_integrality(sol, problem)
            checks.append({"name": f"integrality-{i}", "pass": integ["pass"]})
            payload.setdefault("integrality", []).append(integ)
        payload["blowdown"] = bd.to_dict()
        return checks, payload
    _record("solve_wbf")
    sols = solve_wbf(problem, grid_step=options.get("grid_step", 0.05), tol=config.tol("newton"))
    if "expect_roots" in options:
        checks.append(
            {"name": "roots-found", "pass": len(sols) == options["expect_roots"], "count": len(sols)}
        )
    else:
        checks.append({"name": "roots-found", "pass": len(sols) >= 1, "count": len(sols)})
    tol_res = config.tol("residual")
    for i, sol in enumerate(sols):
        worst = max(
            [float(v) for v in sol.h_residuals]
            + [float(v) for v in sol.ca_residuals]
            + [abs(float(v)) for v in sol.boundary_residuals]
        )
        checks.append(
            {
                "name": f"solution-{i}-residuals",
                "pass": worst <= tol_res and sol.positive,
                "residual": worst,
                "positive": sol.positive,
            }
        )
    payload["solutions"] = [s.to_dict() for s in sols]
    if problem.N == 1:
        _record("check_sign_conditions")
        sign_rep = check_sign_conditions(problem)
        checks.append({"name": "sign-conditions", "pass": sign_rep["pass"]})
        payload["sign_conditions"] = sign_rep
    if degrees is not None:
        for i, sol in enumerate(sols):
            _record("check_integrality")
            integ = check_integrality(sol, problem, degrees)
            checks.append({"name": f"integrality-{i}", "pass": integ["pass"]})
            payload.setdefault("integrality", []).append(integ)
    if sols:
        first = sols[0]
        _record("h_exact")
        hpoly = h_exact(problem, 0, x_others=tuple(first.x[1:]))
        payload["h0_coeffs_float"] = [float(c) for c in hpoly.coeffs]
        _record("solve_B")
        payload["B_first"] = solve_B([float(v) for v in first.x], problem)
        oracle = _gl32_oracle(problem, list(first.x))
        checks.append({"name": "oracle-gl32", "pass": oracle <= config.tol("agree"), "residual": oracle})
        _record("poly_integrate_interval")
        closure = poly_integrate_interval(first.F.derivative(), Fraction(-1), Fraction(1))
        checks.append(
            {
                "name": "boundary-closure",
                "pass": abs(float(closure)) <= tol_res,
                "value": closure,
            }
        )
    return checks, payload


_EXTREMAL_KEYS = {"kind", "dims", "scals", "etas", "csc", "verify", "samples", "seed", "gauge"}


def handle_solve_extremal(config: RunConfig):
    if not config.input_path:
        raise UsageError("solve-extremal needs --input")
    table = _load_toml(config.input_path)
    _check_keys(table, _EXTREMAL_KEYS, "extremal file")
    dims = [int(v) for v in _need(table, "dims", "extremal file")]
    scals = _rat_list(_need(table, "scals", "extremal file"), "scals")
    etas = _rat_list(_need(table, "etas", "extremal file"), "etas")
    if len(dims) != len(scals):
        raise UsageError("dims and scals must have equal length")
    csc = bool(table.get("csc", False))
    try:
        _record("extremal_profile_l1")
        res = extremal_profile_l1(list(zip(dims, scals)), etas, csc=csc)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"extremal build failed: {exc}") from None
    _record("real_roots")
    located = real_roots(res.F, (Fraction(-1), Fraction(1)))
    # the boundary conditions force zeros at the endpoints; only roots in
    # the open fibre interval disqualify the profile
    interior = count_roots_open(res.F, Fraction(-1), Fraction(1))
    checks = [
        {"name": "profile-positive", "pass": res.positive},
        {"name": "no-interior-roots", "pass": interior == 0, "count": interior, "roots": located},
    ]
    if csc:
        checks.append({"name": "csc-consistent", "pass": res.csc_consistent})
    payload = {"extremal": res.to_dict()}
    if table.get("verify", False):
        kappas = []
        for d_a, scal_a, eta_a in zip(dims, scals, etas):
            s_a = Fraction(scal_a, 2 * d_a)
            sign = 1 if eta_a < 0 else -1  # x = -1/eta
            kappas.append(float(Fraction(2 * sign) * s_a / (d_a + 1)))
        data = line_bundle_data(etas, dims, kappas, res.F, table.get("gauge", "radial"))
        metric_field = MetricField(data, name="extremal")
        pts = sample_points(data, max(3, _resolved(config, table, "samples", 10)), _resolved(config, table, "seed", 0))
        _record("verify_extremal")
        ver = verify_extremal(metric_field, pts)
        checks.append(
            {"name": "extremal-residual", "pass": ver["residual"] <= config.tol("extremal"), "residual": ver["residual"]}
        )
        _record("eval_metric")
        g, _, _, _ = eval_metric(data, metric_field.point(pts[0]))
        payload["verification"] = ver
        payload["min_metric_eigenvalue"] = float(np.min(np.linalg.eigvalsh(g)))
    return checks, payload


def handle_verify_curvature(config: RunConfig):
    table, data, metric_field, pts, eval_op, profile = _load_scene(config)
    requested = table.get("checks", ["scal"])
    fd_step = float(table["fd_step"]) if "fd_step" in table else None
    _record(eval_op)
    if eval_op == "eval_orthotoric_metric":
        g0, om0, _, _ = eval_orthotoric_metric(profile, metric_field.point(pts[0]))
    elif eval_op == "eval_line_bundle_metric":
        g0, om0, _, _ = eval_line_bundle_metric(data, metric_field.point(pts[0]))
    else:
        g0, om0, _, _ = eval_metric(data, metric_field.point(pts[0]))
    checks = []
    payload = {
        "model": table["model"],
        "points": [list(p) for p in pts],
        "blocks": {
            "n": metric_field.n,
            "min_eig_g": float(np.min(np.linalg.eigvalsh(g0))),
            "max_sym_omega": float(np.abs(om0 + om0.T).max()),
        },
    }
    for name in requested:
        if name == "scal":
            _record("curvature")
            reports = [curvature(metric_field, v, fd_step) for v in pts]
            scals = [r.scalar for r in reports]
            payload["curvature"] = [r.to_dict() for r in reports]
            if "expected_scalar" in table:
                want = _float_any(table["expected_scalar"], "expected_scalar")
                dev = max(abs(s - want) for s in scals)
                checks.append({"name": "scal", "pass": dev <= config.tol("scal"), "deviation": dev, "expected": want})
            else:
                checks.append({"name": "scal", "pass": True, "values": scals})
        elif name == "hamiltonian":
            _record("verify_hamiltonian")
            res = max(verify_hamiltonian(metric_field, v, fd_step) for v in pts)
            checks.append({"name": "hamiltonian", "pass": res <= config.tol("hamiltonian"), "residual": res})
        elif name == "einstein":
            _record("verify_einstein")
            lam, dev = verify_einstein(metric_field, pts, fd_step)
            ok = dev <= config.tol("einstein") * max(abs(lam), 1e-30)
            entry = {"name": "einstein", "pass": ok, "lambda": lam, "deviation": dev}
            if "expected_lambda" in table:
                want = _float_any(table["expected_lambda"], "expected_lambda")
                entry["expected_lambda"] = want
                entry["pass"] = ok and abs(lam - want) <= config.tol("einstein") * max(abs(want), 1e-30)
            checks.append(entry)
        elif name == "extremal":
            _record("verify_extremal")
            ver = verify_extremal(metric_field, pts, fd_step)
            checks.append(
                {"name": "extremal", "pass": ver["residual"] <= config.tol("extremal"), "residual": ver["residual"]}
            )
            payload["extremal"] = ver
        elif name == "spectrum":
            checks.append(_spectrum_check(config, data, metric_field, pts[0]))
        else:
            raise UsageError(f"unknown scene check {name!r}")
    return checks, payload


def _expected_spectrum(data: CalabiData, vec: np.ndarray) -> np.ndarray:
    xi = vec[: data.ell]
    expected = list(xi) * 2
    for eta, factor in zip(data.etas, data.factors):
        expected.extend([float(eta)] * (2 * factor.dim))
    return np.sort(np.array(expected))


def _spectrum_check(config: RunConfig, data: CalabiData, metric_field: MetricField, vec: np.ndarray) -> dict:
    _record("momentum_spectrum")
    spec = momentum_spectrum(metric_field, vec)
    expected = _expected_spectrum(data, vec)
    dev = float(np.abs(spec - expected).max())
    return {
        "name": "spectrum",
        "pass": dev <= config.tol("spectrum"),
        "deviation": dev,
        "eigenvalues": [float(v) for v in spec],
    }


def handle_spectrum(config: RunConfig):
    table, data, metric_field, pts, _, _ = _load_scene(config)
    checks = []
    values = []
    for i, v in enumerate(pts):
        entry = _spectrum_check(config, data, metric_field, v)
        entry["name"] = f"spectrum-{i}"
        values.append(entry.pop("eigenvalues"))
        checks.append(entry)
    payload = {"model": table["model"], "points": [list(p) for p in pts], "eigenvalues": values}
    return checks, payload


# battery over the bundled corpus; every operation must be recorded
BATTERY = (
    ("validate-polytope", "polytope_cp2.toml"),
    ("validate-polytope", "polytope_square.toml"),
    ("validate-polytope", "polytope_m21.toml"),
    ("build-orthotoric", "orthotoric_m2.toml"),
    ("check-compactify", "profile_fs_m2.toml"),
    ("check-compactify", "profile_bf321.toml"),
    ("check-compactify", "profile_m21.toml"),
    ("solve-wbf", "problem_d1s2.toml"),
    ("solve-wbf", "problem_ks21.toml"),
    ("solve-wbf", "problem_cp2xcp3.toml"),
    ("solve-wbf", "problem_blowdown.toml"),
    ("solve-extremal", "extremal_d2.toml"),
    ("verify-curvature", "scene_fs_m2.toml"),
    ("verify-curvature", "scene_m21.toml"),
    ("verify-curvature", "scene_ks21.toml"),
    ("verify-curvature", "scene_line_d1.toml"),
    ("spectrum", "scene_fs_m2.toml"),
)


def bundled_corpus() -> Path:
    return Path(__file__).parent / "data"


def handle_report_all(config: RunConfig):
    corpus = Path(config.input_path) if config.input_path else bundled_corpus()
    if not corpus.is_dir():
        raise UsageError(f"report-all needs a corpus directory, got {corpus}")
    RECORDED_OPS.clear()
    _record("run")
    checks = []
    runs = []
    for command, filename in BATTERY:
        path = corpus / filename
        if not path.is_file():
            raise UsageError(f"corpus file missing: {path}")
        sub = RunConfig(
            command=command,
            input_path=str(path),
            tolerances=config.tolerances,
            no_timestamp=True,
        )
        sub_checks, sub_payload = _HANDLERS[command](sub)
        ok = all(c["pass"] for c in sub_checks)
        checks.append({"name": f"{command}:{filename}", "pass": ok})
        runs.append(
            {
                "command": command,
                "file": filename,
                "passed": ok,
                "checks": sub_checks,
                "result": sub_payload,
            }
        )
    exercised = sorted(RECORDED_OPS)
    missing = sorted(ALL_OPS - RECORDED_OPS)
    checks.append({"name": "op-coverage", "pass": not missing, "missing": missing})
    payload = {"corpus": str(corpus), "runs": runs, "ops_exercised": exercised}
    return checks, payload


_HANDLERS = {
    "validate-polytope": handle_validate_polytope,
    "build-orthotoric": handle_build_orthotoric,
    "check-compactify": handle_check_compactify,
    "solve-wbf": handle_solve_wbf,
    "solve-extremal": handle_solve_extremal,
    "verify-curvature": handle_verify_curvature,
    "spectrum": handle_spectrum,
    "report-all": handle_report_all,
}


def run(config: RunConfig) -> int:
    """Dispatch one command; returns the process exit code."""
    _record("run")
    if not config.tolerances:
        config.tolerances = dict(DEFAULT_TOLERANCES)
    if config.preset and config.command != "solve-wbf":
        print("error: --preset is only meaningful for solve-wbf", file=sys.stderr)
        return 2
    try:
        checks, payload = _HANDLERS[config.command](config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, KeyError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return _write_report(config, checks, payload)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
