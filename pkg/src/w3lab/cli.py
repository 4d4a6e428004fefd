"""Command-line surface: gram, kac-verify, classify, region, fz-check,
vacuum-spectrum.

All payloads are JSON or RFC-4180 CSV on stdout; structured errors go to
stderr as JSON.  Exit codes: 0 ok (verdict in payload), 2 pole at c = -22/5,
3 level too large, 4 Kac-comparison deviation, 5 residual/positivity failure,
6 cutoff exceeded.  Symbolic Gram matrices are cached per level under
$W3LAB_CACHE_DIR (they are parameter-free polynomial objects); evaluation is
cheap and never cached.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import click

from . import fock, kac, verma
from .classify import classify as run_classify
from .classify import region_scan, region_scan_csv
from .exact import PoleAtForbiddenCentralCharge, parse_rational

EXIT_POLE = 2
EXIT_LEVEL = 3
EXIT_DEVIATION = 4
EXIT_RESIDUAL = 5
EXIT_CUTOFF = 6

# bump when the serialized Gram layout changes; part of the cache key
FORMAT_VERSION = "gram-json-1"

DEFAULT_TOLERANCES = {
    "kacRatio": 1e-8,
    "relationResidual": 1e-9,
    "automorphismResidual": 1e-10,
    "weakSymmetry": 1e-9,
    "zeroVector": 1e-12,
    "psd": 1e-8,
}


@dataclass
class RunConfig:
    """Resolved run settings shared by the subcommands."""

    cache_dir: Path | None
    output_format: str = "json"
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        if any(v <= 0 for v in self.tolerances.values()):
            raise ValueError("all tolerances must be positive")
        if self.output_format not in ("json", "csv", "pretty"):
            raise ValueError(f"unknown output format {self.output_format!r}")


def _fail(code: int, kind: str, message: str):
    json.dump({"error": kind, "message": message}, sys.stderr)
    sys.stderr.write("\n")
    sys.exit(code)


def _cache_dir() -> Path | None:
    root = os.environ.get("W3LAB_CACHE_DIR")
    if root is None:
        root = os.path.join(os.path.expanduser("~"), ".cache", "w3lab")
    path = Path(root)
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".probe"
        probe.write_text("")
        probe.unlink()
    except OSError:
        return None  # caching disabled
    return path


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _config(**overrides) -> RunConfig:
    tol = dict(DEFAULT_TOLERANCES)
    tol.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(cache_dir=_cache_dir(), tolerances=tol)


def _gram_cached(level: int, level_cap: int,
                 cfg: RunConfig | None = None) -> verma.GramMatrix:
    cache = cfg.cache_dir if cfg is not None else _cache_dir()
    key = hashlib.sha256(f"{FORMAT_VERSION}:{level}".encode()).hexdigest()[:16]
    if cache is not None:
        f = cache / f"gram-{level}-{key}.json"
        if f.exists():
            return verma.GramMatrix.from_json(f.read_text())
    g = verma.gram_matrix(level, level_cap=level_cap)
    if cache is not None:
        _atomic_write(cache / f"gram-{level}-{key}.json", g.to_json())
    return g


class RationalParam(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        try:
            return parse_rational(str(value))
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a rational (use p/q)", param, ctx)


RATIONAL = RationalParam()


@click.group()
def main():
    """Exact W3-algebra computations and unitarity checks."""


# ---------------------------------------------------------------------------
# gram
# ---------------------------------------------------------------------------

@main.command("gram")
@click.option("--level", type=int, required=True)
@click.option("--c", "c_val", type=RATIONAL, default=None)
@click.option("--h", "h_val", type=RATIONAL, default=None)
@click.option("--w", "w_val", type=RATIONAL, default=None)
@click.option("--symbolic", is_flag=True, help="print symbolic entries")
@click.option("--level-cap", type=int, default=verma.DEFAULT_LEVEL_CAP)
@click.option("--format", "fmt", type=click.Choice(["json", "pretty"]),
              default="json")
def cmd_gram(level, c_val, h_val, w_val, symbolic, level_cap, fmt):
    """Level-N Gram matrix of the canonical invariant form."""
    try:
        g = _gram_cached(level, level_cap)
    except verma.LevelTooLarge as e:
        _fail(EXIT_LEVEL, "LevelTooLarge", str(e))
    if symbolic or c_val is None:
        if fmt == "json":
            click.echo(g.to_json())
        else:
            for word, row in zip(g.basis, g.entries):
                click.echo(f"{word.label():16s} "
                           + "  ".join(str(e) for e in row))
        return
    if any(v is None for v in (c_val, h_val, w_val)):
        _fail(1, "BadArguments", "--c/--h/--w must be given together")
    try:
        m = g.evaluate(c_val, h_val, w_val)
    except PoleAtForbiddenCentralCharge as e:
        _fail(EXIT_POLE, "PoleAtForbiddenCentralCharge", str(e))
    payload = {
        "level": level,
        "point": {"c": str(c_val), "h": str(h_val), "w": str(w_val)},
        "basis": [wd.label() for wd in g.basis],
        "entries": [[str(x) for x in row] for row in m],
        "determinant": str(verma.determinant_at(g, c_val, h_val, w_val)),
        "determinantMethod": "evaluated",
    }
    click.echo(json.dumps(payload, indent=2))


# ---------------------------------------------------------------------------
# kac-verify
# ---------------------------------------------------------------------------

def _random_region_points(k: int, seed: int):
    """Deterministic rational sample points with 2 < c < 98, f11 - w^2 > 0."""
    rng = random.Random(seed)
    pts = []
    while len(pts) < k:
        c = Fraction(rng.randint(3, 97)) + Fraction(rng.randint(0, 99), 100)
        h = Fraction(rng.randint(1, 80), rng.randint(1, 8))
        cap = kac.f11(h, c)
        if cap <= 0:
            continue
        wmax = float(cap) ** 0.5
        w = Fraction(int(rng.uniform(-0.9, 0.9) * wmax * 1000), 1000)
        if kac.f11(h, c) - w * w > 0:
            pts.append((c, h, w))
    return pts


@main.command("kac-verify")
@click.option("--level", type=int, required=True)
@click.option("--samples", type=click.Path(exists=True), default=None,
              help="JSON file: list of [c, h, w] rationals as strings")
@click.option("--random", "n_random", type=int, default=0)
@click.option("--seed", type=int, default=0)
@click.option("--tol", type=float, default=None)
@click.option("--level-cap", type=int, default=verma.DEFAULT_LEVEL_CAP)
def cmd_kac_verify(level, samples, n_random, seed, tol, level_cap):
    """Compare det(Gram_N) with the closed-form product at sample points."""
    try:
        tol = _config(kacRatio=tol).tolerances["kacRatio"]
    except ValueError as e:
        _fail(1, "BadArguments", str(e))
    if samples:
        raw = json.loads(Path(samples).read_text())
        pts = [tuple(parse_rational(str(x)) for x in row) for row in raw]
    elif n_random:
        pts = _random_region_points(n_random, seed)
    else:
        _fail(1, "BadArguments", "give --samples FILE or --random K")
    try:
        g = _gram_cached(level, level_cap)
        rep = kac.compare_with_gram(level, pts, tol=tol, gram=g)
    except verma.LevelTooLarge as e:
        _fail(EXIT_LEVEL, "LevelTooLarge", str(e))
    except kac.DegenerateSample as e:
        _fail(EXIT_DEVIATION, "DegenerateSample", str(e))
    except PoleAtForbiddenCentralCharge as e:
        _fail(EXIT_POLE, "PoleAtForbiddenCentralCharge", str(e))
    click.echo(rep.to_json())
    if rep.verdict != "ok":
        sys.exit(EXIT_DEVIATION)


# ---------------------------------------------------------------------------
# classify / region
# ---------------------------------------------------------------------------

def _parse_real(text: str) -> Fraction:
    """Rational 'p/q' preferred; decimal/float inputs accepted with a warning."""
    floaty = "." in text or "e" in text.lower()
    try:
        val = parse_rational(text)
    except ValueError:
        val = Fraction(float(text))
        floaty = True
    if floaty:
        click.echo("warning: decimal input converted to the exact rational "
                   f"{val}; boundary verdicts reflect that value", err=True)
    return val


@main.command("classify")
@click.option("--c", "c_val", required=True)
@click.option("--h", "h_val", required=True)
@click.option("--w", "w_val", required=True)
def cmd_classify(c_val, h_val, w_val):
    """Unitarity verdict for one (c, h, w)."""
    try:
        v = run_classify(_parse_real(c_val), _parse_real(h_val),
                         _parse_real(w_val))
    except PoleAtForbiddenCentralCharge as e:
        _fail(EXIT_POLE, "PoleAtForbiddenCentralCharge", str(e))
    click.echo(json.dumps(v.to_dict(), indent=2))


@main.command("region")
@click.option("--c", "c_val", required=True)
@click.option("--h-min", default="0")
@click.option("--h-max", required=True)
@click.option("--w-min", default=None)
@click.option("--w-max", required=True)
@click.option("--res", type=int, required=True)
def cmd_region(c_val, h_min, h_max, w_min, w_max, res):
    """CSV grid of verdicts over [h_min,h_max] x [w_min,w_max]."""
    wmax = _parse_real(w_max)
    wmin = _parse_real(w_min) if w_min is not None else -wmax
    try:
        rows = region_scan(
            _parse_real(c_val), (_parse_real(h_min), _parse_real(h_max)),
            (wmin, wmax), res)
    except PoleAtForbiddenCentralCharge as e:
        _fail(EXIT_POLE, "PoleAtForbiddenCentralCharge", str(e))
    except ValueError as e:
        _fail(1, "BadArguments", str(e))
    click.echo(region_scan_csv(rows), nl=False)


# ---------------------------------------------------------------------------
# fz-check
# ---------------------------------------------------------------------------

@main.command("fz-check")
@click.option("--variant", type=click.Choice(list(fock.VARIANTS)),
              default="vacuumModified")
@click.option("--kappa", type=float, default=1.0)
@click.option("--q1", type=float, default=0.0)
@click.option("--q2", type=float, default=0.0)
@click.option("--cutoff", type=int, default=9)
@click.option("--max-mode", type=int, default=3)
@click.option("--max-level", type=int, default=2)
@click.option("--eta-im", type=float, default=0.0,
              help="imaginary part of eta for the automorphism check")
def cmd_fz_check(variant, kappa, q1, q2, cutoff, max_mode, max_level, eta_im):
    """Aggregate residual report for the chosen realization."""
    if max_level + 2 * max_mode > cutoff:
        _fail(EXIT_CUTOFF, "CutoffExceeded",
              "need max_level + 2*max_mode <= cutoff")
    params = fock.RealizationParams(kappa=kappa, q1=q1, q2=q2, cutoff=cutoff)
    tol = _config().tolerances
    try:
        relations = fock.check_w3_relations(variant, params, max_mode,
                                            max_level)
        auto = fock.check_automorphism_identity(kappa, complex(0, eta_im),
                                                max_mode, max_level, cutoff)
        ode = fock.verify_rho_ode(20)
        report = {
            "variant": variant,
            "params": {"kappa": kappa, "q1": q1, "q2": q2, "cutoff": cutoff},
            "relations": {
                "maxResidual": relations["maxResidual"],
                "worstCase": relations["worstCase"],
                "centralCharge": relations["centralCharge"],
            },
            "automorphismIdentity": {"maxResidual": auto["maxResidual"]},
            "rhoOde": {"maxResidual": max(abs(float(v))
                                          for v in ode.values())},
        }
        failures = []
        if relations["maxResidual"] > tol["relationResidual"]:
            failures.append("relations")
        if relations["centralCharge"]["error"] > tol["relationResidual"]:
            failures.append("centralCharge")
        if auto["maxResidual"] > tol["automorphismResidual"]:
            failures.append("automorphismIdentity")
        if any(v != 0 for v in ode.values()):
            failures.append("rhoOde")
        if variant == "vacuumModified":
            weak = fock.check_weak_symmetry(params, max_mode, max_level)
            report["weakSymmetry"] = {
                "maxPairDefect": weak["maxPairDefect"],
                "maxTripleDefect": weak["maxTripleDefect"],
                "unpairedControlDefect": weak["unpairedControlDefect"],
            }
            if max(weak["maxPairDefect"],
                   weak["maxTripleDefect"]) > tol["weakSymmetry"]:
                failures.append("weakSymmetry")
            if q1 == 0 and q2 == 0:
                zv = fock.zero_vector_norms(params)
                report["zeroVectors"] = zv
                if max(zv.values()) > tol["zeroVector"]:
                    failures.append("zeroVectors")
        report["failures"] = failures
    except fock.CutoffExceeded as e:
        _fail(EXIT_CUTOFF, "CutoffExceeded", str(e))
    click.echo(json.dumps(report, indent=2))
    if failures:
        sys.exit(EXIT_RESIDUAL)


# ---------------------------------------------------------------------------
# vacuum-spectrum
# ---------------------------------------------------------------------------

@main.command("vacuum-spectrum")
@click.option("--kappa", type=float, required=True)
@click.option("--level", type=int, required=True)
@click.option("--cutoff", type=int, default=8)
@click.option("--psd-tol", type=float, default=None)
def cmd_vacuum_spectrum(kappa, level, cutoff, psd_tol):
    """Eigenvalues of the vacuum cyclic-subspace Gram (vacuumModified)."""
    try:
        psd_tol = _config(psd=psd_tol).tolerances["psd"]
    except ValueError as e:
        _fail(1, "BadArguments", str(e))
    if level > cutoff - 2:
        _fail(EXIT_CUTOFF, "CutoffExceeded", "need level <= cutoff - 2")
    params = fock.RealizationParams(kappa=kappa, cutoff=cutoff)
    try:
        cg = fock.cyclic_gram("vacuumModified", params, level)
    except fock.CutoffExceeded as e:
        _fail(EXIT_CUTOFF, "CutoffExceeded", str(e))
    eigs = sorted(float(x) for x in cg.eigenvalues)
    payload = {
        "kappa": kappa,
        "centralCharge": params.central_charge,
        "level": level,
        "dimension": len(cg.words),
        "eigenvalues": eigs,
        "minEigenvalue": eigs[0],
    }
    click.echo(json.dumps(payload, indent=2))
    if eigs[0] < -psd_tol:
        sys.exit(EXIT_RESIDUAL)


if __name__ == "__main__":
    main()
