"""Command-line surface: validation, entropy sweeps, verification, K-theory.

Commands:

* ``validate <file>``: check an algebra presentation; exit 0 valid,
  1 invalid (violations printed), 2 unreadable or malformed input.
* ``entropy``: run a twist-orbit growth sweep over a t grid, emit CSV and
  optionally a self-contained SVG plot of the estimates against the
  predicted envelope.
* ``verify``: the batch harness; prints hypothesis-status lines and one
  verdict per theorem-shaped claim, with tolerances.  Exit 0 when every
  verdict passes or is hypothesis-not-met, 1 on any failure.
* ``ktheory``: lattice data as a JSON report (Euler matrix, functor matrix,
  characteristic polynomial, eigenvalues, radius, spectral verdicts).
* ``zoo list`` / ``zoo emit <name>``: the instance catalog.

Identical configurations produce byte-identical CSV output: floats are
formatted with a fixed shortest-repr rule and all row orderings are sorted.
The summand cap honours the TWISTLAB_CAP environment variable.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import entropy_lab as el
from . import functor_kit as fk
from . import io as tio
from . import knum, perfcx, svgplot, zoo
from .algebra_core import GradedAlgebra, validate as validate_algebra
from .exactlin import QQ, DEFAULT_PRIME_FIELD, ScalarField

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


def _fmt(x: float) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0
    return format(x, ".12g")


# ---------------------------------------------------------------------------
# configuration and shared pipeline


@dataclass(frozen=True)
class RunConfig:
    instance: str | None = None
    algebra_path: str | None = None
    functor: str = ""
    tmin: float = -2.0
    tmax: float = 2.0
    tstep: float = 0.25
    n_max: int = el.DEFAULT_N_MAX
    tail_k: int = el.DEFAULT_TAIL_K
    field: str = "p"
    csv_path: str | None = None
    svg_path: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.tstep <= 0:
            raise ValueError("grid step must be positive")
        if self.n_max < 4:
            raise ValueError("n_max must be at least 4")

    def scalar_field(self) -> ScalarField:
        return QQ if self.field == "q" else DEFAULT_PRIME_FIELD

    def t_grid(self) -> list[float]:
        return el.default_t_grid(self.tmin, self.tmax, self.tstep)


def parse_word(A: GradedAlgebra, text: str) -> list:
    """Parse an endofunctor word, e.g. ``stwist:P1;shift:2``.

    Generators compose right to left: the rightmost applies first.
    """
    atoms = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, _, arg = chunk.partition(":")
        name = name.strip()
        arg = arg.strip()
        if name == "shift":
            atoms.append(("shift", int(arg)))
        elif name in ("stwist", "ptwist"):
            atoms.append((name, zoo.resolve_object(A, arg)))
        else:
            raise ValueError(f"unknown generator {name!r} in functor word")
    if not atoms:
        raise ValueError("empty functor word")
    return atoms


def _load_algebra_for(config: RunConfig) -> tuple[GradedAlgebra, zoo.InstanceDescriptor | None]:
    if config.instance:
        desc = zoo.get_instance(config.instance)
        return desc.build(config.scalar_field()), desc
    if config.algebra_path:
        return tio.load_algebra(config.algebra_path), None
    raise ValueError("need --instance or --algebra")


def _model_functor_for(word, A: GradedAlgebra) -> fk.ModelSphericalFunctor | None:
    """The model functor behind a single-twist word, if the word is one."""
    if len(word) != 1 or word[0][0] == "shift":
        return None
    kind, E = word[0]
    end = perfcx.hom_complex(E, E).cohomology
    if kind == "stwist":
        d = fk.spherical_shape_d(end)
        return fk.ModelSphericalFunctor(E, "spherical", d) if d else None
    d = fk.p_object_shape_d(end)
    return fk.ModelSphericalFunctor(E, "p-object", d) if d else None


@dataclass
class EnvelopeInfo:
    """Predicted entropy envelope and the status of each hypothesis behind it."""

    cotwist_rate: float | None = None     # slope of h_t of the shifted cotwist
    split_gen_ok: bool | None = None      # machine-checked shift criterion
    ker_witness: str | None = None        # label of a Hom-killing object, if found
    spherical_check: bool | None = None   # dimension-level object check

    def lower(self, t: float) -> float | None:
        if self.cotwist_rate is None:
            return None
        bounds = []
        if self.split_gen_ok:
            bounds.append(self.cotwist_rate * t)
        if self.ker_witness is not None:
            bounds.append(0.0)
        return max(bounds) if bounds else None

    def upper(self, t: float) -> float | None:
        if self.cotwist_rate is None or not self.split_gen_ok:
            return None
        return max(0.0, self.cotwist_rate * t)

    def hypothesis_lines(self) -> list[str]:
        lines = []
        if self.spherical_check is not None:
            lines.append(
                f"HYPOTHESIS object-check: "
                f"{'pass' if self.spherical_check else 'FAIL'} (dimension-level only)")
        if self.split_gen_ok is not None:
            lines.append(
                f"HYPOTHESIS adjoint-image-generates: "
                f"{'machine-checked pass' if self.split_gen_ok else 'not established'}")
        lines.append(
            f"HYPOTHESIS orthogonal-object-exists: "
            + (f"machine-found witness {self.ker_witness}" if self.ker_witness
               else "no witness found"))
        lines.append("HYPOTHESIS smoothness-of-host: assumed-unestablished "
                     "(spectral comparisons are consistency experiments)")
        return lines


def make_envelope(word, A: GradedAlgebra,
                  S: fk.ModelSphericalFunctor | None) -> EnvelopeInfo:
    env = EnvelopeInfo()
    if S is None:
        return env
    env.cotwist_rate = float(S.cotwist_shift + 2)
    env.spherical_check = bool(
        zoo.check_spherical(S.E, S.d) if S.kind == "spherical"
        else zoo.check_p_object(S.E, S.d))
    env.split_gen_ok = zoo.split_gen_criterion(S)
    candidates = [(v, perfcx.projective(A, v)) for v in A.vertices]
    witness = fk.ker_SR_witness(S, [c for _, c in candidates])
    if witness is not None:
        for v, c in candidates:
            if c.summands == witness.summands:
                env.ker_witness = f"P{v}"
                break
    return env


@dataclass
class SweepRow:
    t: float
    estimate: el.EntropyEstimate
    cert_rate: float | None
    lower: float | None
    upper: float | None
    verdict: str


@dataclass
class SweepResult:
    config: RunConfig
    orbit: fk.IterationResult
    rows: list[SweepRow]
    envelope: EnvelopeInfo

    @property
    def all_within(self) -> bool:
        return all(r.verdict in ("within-envelope", "no-prediction")
                   for r in self.rows)


def run_sweep(config: RunConfig, A: GradedAlgebra, word) -> SweepResult:
    G = perfcx.full_generator(A)
    S = _model_functor_for(word, A)
    envelope = make_envelope(word, A, S)
    orbit = fk.iterate(word, G, config.n_max)
    if not orbit.steps:
        raise RuntimeError("orbit produced no steps (cap too small?)")
    bound = (el.cert_twist_bound(S, G, n=orbit.steps[-1].n, check=False)
             if S is not None else None)
    rows = []
    for t in config.t_grid():
        series = el.series_from_dims(orbit.dims_list(), t, orbit.complete)
        est = el.entropy_estimate(series, config.tail_k)
        cert_rate = bound.rate(t) if bound is not None else None
        lo = envelope.lower(t)
        hi = envelope.upper(t)
        tol = el.tolerance_at(t)
        if lo is None and hi is None:
            verdict = "no-prediction"
        else:
            blo, bhi = est.bracket
            ok = True
            if lo is not None and bhi < lo - tol:
                ok = False
            if hi is not None and blo > hi + tol:
                ok = False
            verdict = "within-envelope" if ok else "outside-envelope"
        if not orbit.complete:
            verdict = "incomplete"
        rows.append(SweepRow(t, est, cert_rate, lo, hi, verdict))
    return SweepResult(config, orbit, rows, envelope)


CSV_HEADER = "t,n,eps,h_tailfit,h_fekete,cert_upper,lower_bound,upper_bound,verdict"


def sweep_to_csv(result: SweepResult) -> str:
    lines = [CSV_HEADER]
    dims_list = result.orbit.dims_list()
    for row in result.rows:
        series = el.series_from_dims(dims_list, row.t, result.orbit.complete)
        last_n = series.entries[-1][0]
        for n, eps in series.entries:
            if n == last_n:
                est = row.estimate
                lines.append(",".join([
                    _fmt(row.t), str(n), _fmt(eps),
                    _fmt(est.value_tail_fit), _fmt(est.value_fekete),
                    _fmt(row.cert_rate) if row.cert_rate is not None else "",
                    _fmt(row.lower) if row.lower is not None else "",
                    _fmt(row.upper) if row.upper is not None else "",
                    row.verdict,
                ]))
            else:
                lines.append(",".join([
                    _fmt(row.t), str(n), _fmt(eps), "", "", "", "", "", "",
                ]))
    return "\n".join(lines) + "\n"


def sweep_to_svg(result: SweepResult, title: str) -> str:
    ts = [r.t for r in result.rows]
    curves = [
        ("h tail-fit", [(t, r.estimate.value_tail_fit) for t, r in zip(ts, result.rows)]),
        ("h fekete", [(t, r.estimate.value_fekete) for t, r in zip(ts, result.rows)]),
    ]
    if any(r.cert_rate is not None for r in result.rows):
        curves.append(("certificate bound",
                       [(t, r.cert_rate) for t, r in zip(ts, result.rows)
                        if r.cert_rate is not None]))
    if any(r.upper is not None for r in result.rows):
        curves.append(("predicted upper",
                       [(t, r.upper) for t, r in zip(ts, result.rows)
                        if r.upper is not None]))
    if any(r.lower is not None for r in result.rows):
        curves.append(("predicted lower",
                       [(t, r.lower) for t, r in zip(ts, result.rows)
                        if r.lower is not None]))
    return svgplot.line_plot(curves, title=title, xlabel="t", ylabel="entropy")


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    try:
        A = tio.load_algebra(args.path)
    except (OSError, tio.FormatError) as exc:
        print(f"input error: {exc}")
        return EXIT_INPUT
    report = validate_algebra(A)
    if report.ok:
        print(f"valid: {len(A.vertices)} vertices, dimension {A.dim}")
        return EXIT_OK
    print("invalid:")
    for issue in report.issues:
        print(f"  {issue}")
    return EXIT_FAIL


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        instance=getattr(args, "instance", None),
        algebra_path=getattr(args, "algebra", None),
        functor=getattr(args, "functor", "") or "",
        tmin=args.tmin, tmax=args.tmax, tstep=args.tstep,
        n_max=args.nmax, tail_k=args.tailk,
        field=getattr(args, "field", "p"),
        csv_path=getattr(args, "csv", None),
        svg_path=getattr(args, "svg", None),
        seed=getattr(args, "seed", 0),
    )


def cmd_entropy(args) -> int:
    try:
        config = _config_from_args(args)
        A, _desc = _load_algebra_for(config)
        word = parse_word(A, config.functor)
    except (OSError, tio.FormatError, ValueError, KeyError) as exc:
        print(f"input error: {exc}")
        return EXIT_INPUT
    result = run_sweep(config, A, word)
    csv_text = sweep_to_csv(result)
    with open(config.csv_path, "w", encoding="utf-8") as fh:
        fh.write(csv_text)
    print(f"wrote {config.csv_path} ({len(result.rows)} grid points, "
          f"n_max={result.orbit.steps[-1].n}, "
          f"{'complete' if result.orbit.complete else 'INCOMPLETE'})")
    if config.svg_path:
        title = f"{config.instance or config.algebra_path}: {config.functor}"
        with open(config.svg_path, "w", encoding="utf-8") as fh:
            fh.write(sweep_to_svg(result, title))
        print(f"wrote {config.svg_path}")
    if not result.orbit.complete:
        return EXIT_FAIL
    return EXIT_OK if result.all_within else EXIT_FAIL


@dataclass
class Verdict:
    name: str
    status: str  # pass | fail | hypothesis-not-met
    detail: str = ""

    def line(self) -> str:
        return f"VERDICT {self.name}: {self.status}" + (
            f" ({self.detail})" if self.detail else "")


def _verify_instance(config: RunConfig) -> tuple[list[str], list[Verdict]]:
    A, desc = _load_algebra_for(config)
    if desc is None:
        raise ValueError("verify requires --instance")
    token = desc.object_token
    E = zoo.resolve_object(A, token)
    if desc.spherical_d is not None:
        kind, d = "spherical", desc.spherical_d
        word = [("stwist", E)]
    else:
        kind, d = "p-object", desc.p_object_d
        word = [("ptwist", E)]
    S = fk.ModelSphericalFunctor(E, kind, d)
    lines: list[str] = []
    verdicts: list[Verdict] = []

    env = make_envelope(word, A, S)
    lines.extend(env.hypothesis_lines())

    result = run_sweep(config, A, word)
    rate = env.cotwist_rate

    # entropy envelope across the grid
    bad = [r.t for r in result.rows if r.verdict == "outside-envelope"]
    verdicts.append(Verdict(
        "twist-entropy-envelope",
        "pass" if not bad else "fail",
        f"cotwist rate {rate:+g} per unit t; grid {config.tmin}..{config.tmax}"
        + (f"; outside at t={bad}" if bad else "")))

    # equality of growth rates at t = 0 (both bounds collapse there)
    row0 = min(result.rows, key=lambda r: abs(r.t))
    d0 = knum.bracket_distance(0.0, row0.estimate.bracket)
    verdicts.append(Verdict(
        "twist-cotwist-rate-equality-at-0",
        "pass" if d0 <= el.tolerance_at(0.0) else "fail",
        f"bracket distance {d0:.4f} at t={row0.t:g}"))

    # certificate squeeze: the assembled upper bound dominates the estimate
    squeeze_bad = [r.t for r in result.rows
                   if r.cert_rate is not None
                   and r.estimate.value_tail_fit > r.cert_rate + 1e-9]
    verdicts.append(Verdict(
        "certificate-dominates-estimate",
        "pass" if not squeeze_bad else "fail",
        f"violations at t={squeeze_bad}" if squeeze_bad else "all grid points"))

    # K-theory: spectral radius and the spectral-witness transfer
    Fm = knum.functor_matrix(word, A, check=False)
    rho = knum.spectral_radius(Fm)
    gy = knum.gy_check(word, A, row0.estimate.bracket,
                       tolerance=el.tolerance_at(0.0),
                       smooth_established=desc.smooth_established, check=False)
    lines.extend("  " + ln for ln in gy.lines())
    verdicts.append(Verdict(
        "gromov-yomdin-equality",
        "pass" if gy.equality_ok else "fail",
        f"log rho = {gy.log_rho:.6f} [{gy.label}]"))
    verdicts.append(Verdict(
        "entropy-at-least-log-radius",
        "pass" if gy.yomdin_ok else "fail",
        f"[{gy.label}]"))

    witness = knum.prop19_witness(S, A, check=False)
    if witness is None:
        verdicts.append(Verdict(
            "cotwist-eigenvector-transfer", "hypothesis-not-met",
            "class of E vanishes in the numerical lattice"))
    else:
        ok = witness.rho_cotwist <= witness.rho_twist + 1e-9
        verdicts.append(Verdict(
            "cotwist-eigenvector-transfer",
            "pass" if ok else "fail",
            f"|lambda| = {abs(witness.eigenvalue)} <= rho(twist) = {witness.rho_twist:.6f}"))

    # exact spot-checks: twist class identity and pairing consistency
    rng = random.Random(config.seed)
    euler = knum.EulerData.from_algebra(A)
    k_ident_ok = True
    if kind == "spherical":
        for v in A.vertices:
            F = perfcx.projective(A, v)
            lhs = knum.k_class(fk.spherical_twist(E, F, check=False))
            chi_EF = euler.pairing(knum.k_class(E), knum.k_class(F))
            rhs = knum.k_class(F) - chi_EF * knum.k_class(E)
            if not np.array_equal(lhs, rhs):
                k_ident_ok = False
    verdicts.append(Verdict(
        "twist-class-identity",
        "pass" if k_ident_ok else "fail",
        "[F] - chi(E,F)[E] on all projectives" if kind == "spherical"
        else "identity action on classes"))

    pair_ok = True
    for _ in range(10):
        X = perfcx.random_complex(A, rng, steps=2)
        Y = perfcx.random_complex(A, rng, steps=2)
        if knum.hom_euler_characteristic(X, Y) != euler.pairing(
                knum.k_class(X), knum.k_class(Y)):
            pair_ok = False
    verdicts.append(Verdict(
        "euler-pairing-consistency",
        "pass" if pair_ok else "fail", "10 random pairs, exact"))
    return lines, verdicts


def cmd_verify(args) -> int:
    try:
        config = _config_from_args(args)
        lines, verdicts = _verify_instance(config)
    except (OSError, tio.FormatError, ValueError, KeyError) as exc:
        print(f"input error: {exc}")
        return EXIT_INPUT
    for ln in lines:
        print(ln)
    failed = False
    for v in verdicts:
        print(v.line())
        if v.status == "fail":
            failed = True
    return EXIT_FAIL if failed else EXIT_OK


def cmd_ktheory(args) -> int:
    try:
        config = _config_from_args(args)
        A, desc = _load_algebra_for(config)
        word = parse_word(A, config.functor)
    except (OSError, tio.FormatError, ValueError, KeyError) as exc:
        print(f"input error: {exc}")
        return EXIT_INPUT
    euler = knum.EulerData.from_algebra(A)
    Fm = knum.functor_matrix(word, A)
    poly = knum.char_poly(Fm.matrix)
    eig = knum.eigenvalues(Fm.matrix)
    rho = knum.spectral_radius(Fm)
    G = perfcx.full_generator(A)
    orbit = fk.iterate(word, G, config.n_max, check=False)
    series = el.series_from_dims(orbit.dims_list(), 0.0, orbit.complete)
    est = el.entropy_estimate(series, config.tail_k)
    smooth = desc.smooth_established if desc else False
    gy = knum.gy_check(word, A, est.bracket, tolerance=el.tolerance_at(0.0),
                       smooth_established=smooth, check=False)
    report = {
        "vertices": list(A.vertices),
        "euler_matrix": euler.chi.tolist(),
        "numerical_rank": euler.numerical_rank(),
        "radical_basis": euler.radical_basis(),
        "functor_word": config.functor,
        "functor_matrix": Fm.matrix.tolist(),
        "char_poly": poly,
        "eigenvalues": [[z.real, z.imag] for z in eig],
        "spectral_radius": rho,
        "log_spectral_radius": (math.log(rho) if rho > 0 else None),
        "h0_estimate": {"tail_fit": est.value_tail_fit,
                        "fekete": est.value_fekete},
        "verdicts": {
            "equality": "pass" if gy.equality_ok else "fail",
            "growth-lower-bound": "pass" if gy.yomdin_ok else "fail",
            "label": gy.label,
            "tolerance": gy.tolerance,
        },
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK if gy.equality_ok and gy.yomdin_ok else EXIT_FAIL


def cmd_zoo(args) -> int:
    if args.zoo_cmd == "list":
        for name in zoo.instance_names():
            print(f"{name}: {zoo.get_instance(name).description}")
        return EXIT_OK
    try:
        desc = zoo.get_instance(args.name)
    except KeyError as exc:
        print(f"input error: {exc}")
        return EXIT_INPUT
    text = tio.dump_algebra(desc.build())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_sweep_args(p, *, functor_required: bool):
    p.add_argument("--instance", help="catalog instance name")
    p.add_argument("--algebra", help="algebra JSON file")
    if functor_required:
        p.add_argument("--functor", required=True,
                       help="endofunctor word, e.g. 'stwist:P1' or 'shift:1;stwist:P1'")
    p.add_argument("--tmin", type=float, default=-2.0)
    p.add_argument("--tmax", type=float, default=2.0)
    p.add_argument("--tstep", type=float, default=0.25)
    p.add_argument("--nmax", type=int, default=el.DEFAULT_N_MAX)
    p.add_argument("--tailk", type=int, default=el.DEFAULT_TAIL_K)
    p.add_argument("--field", choices=("p", "q"), default="p",
                   help="prime-field (default) or rational arithmetic")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="twistlab",
        description="twist autoequivalences, entropy growth, and lattice "
                    "invariants over finite-dimensional graded algebras")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate an algebra JSON file")
    p.add_argument("path")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("entropy", help="growth sweep over a t grid")
    _add_sweep_args(p, functor_required=True)
    p.add_argument("--csv", required=True, help="output CSV path")
    p.add_argument("--svg", help="optional output SVG plot path")
    p.set_defaults(fn=cmd_entropy)

    p = sub.add_parser("verify", help="aggregated per-theorem verdicts")
    _add_sweep_args(p, functor_required=False)
    p.set_defaults(fn=cmd_verify, functor="")

    p = sub.add_parser("ktheory", help="lattice action report as JSON")
    _add_sweep_args(p, functor_required=True)
    p.set_defaults(fn=cmd_ktheory)

    p = sub.add_parser("zoo", help="instance catalog")
    zsub = p.add_subparsers(dest="zoo_cmd", required=True)
    zlist = zsub.add_parser("list")
    zlist.set_defaults(fn=cmd_zoo)
    zemit = zsub.add_parser("emit")
    zemit.add_argument("name")
    zemit.add_argument("--out")
    zemit.set_defaults(fn=cmd_zoo)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
