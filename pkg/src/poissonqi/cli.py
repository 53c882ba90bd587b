"""Command-line entry point.

Exit status: 0 on success, 1 on a domain error (message on stderr),
2 on a usage error. JSON is written for single results, CSV for sweeps and
samples; floats always carry 17 significant digits.
"""
from __future__ import annotations

import argparse
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import channels, divergences, estimation, imaging, io, kac, oracle
from .errors import PoissonQIError
from .psd import TOL_HERM, TOL_PSD, TOL_SUPP, validate_psd
from .states import IntensityOperator, intensity_from_density, as_density


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _complexes(text: str) -> list[complex]:
    out = []
    for v in text.split(","):
        v = v.strip().replace(" ", "")
        if v:
            c = complex(v)
            out.append(c if c.imag else c.real)
    return out


def _write(text: str, out: Optional[str]):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header: Sequence[str], rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(io.format_csv_value(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


# --- subcommands ---------------------------------------------------------------

def cmd_validate(args) -> int:
    P = validate_psd(io.load_matrix(args.matrix), tol_psd=args.tol_psd, tol_herm=args.tol_herm)
    print(io.dumps({"psd": True, "dim": P.dim, "trace": P.trace,
                    "rank": P.rank(args.tol_supp),
                    "eigenvalues": P.eigenvalues}))
    return 0


def _operand(path: str, classical: bool):
    if classical:
        return io.parse_vector(path)
    return io.load_intensity(path)


def cmd_divergence(args) -> int:
    a = _operand(args.a, args.classical)
    b = _operand(args.b, args.classical)
    rep = divergences.divergence(args.kind, a, b, s=args.s, classical=args.classical,
                                 tol_s=args.tol_s, tol_supp=args.tol_supp)
    doc = {"kind": rep.kind, "value": rep.value}
    if rep.s_star is not None:
        doc["s_star"] = rep.s_star
    if args.s is not None and rep.kind in ("chernoff_s", "alpha_div"):
        doc["s"] = args.s
    print(io.dumps(doc))
    return 0


def _family_from_doc(doc: dict, q: int):
    kind = doc.get("family")
    if kind == "imaging":
        g = doc.get("gamma", 0.0)
        if isinstance(g, dict):
            g = complex(g.get("re", 0.0), g.get("im", 0.0))
        return "imaging", (float(doc.get("N0", 1.0)), g,
                           float(doc.get("delta", estimation.DELTA_REG)))
    if kind == "linear":
        base = io.matrix_from_doc(doc["base"])
        gens = [io.matrix_from_doc(g) for g in doc["generators"]]
        if len(gens) != q:
            raise PoissonQIError(f"family has {len(gens)} generators but theta has {q} entries")
        fam = estimation.ParamFamily(
            lambda t: base + sum(ti * g for ti, g in zip(t, gens)),
            lambda t: gens)
        return "family", fam
    if kind == "explicit":
        return "explicit", doc["points"]
    raise PoissonQIError(f"unknown family kind {kind!r}")


def _explicit_helstrom(points, theta, fd_step, tol_supp):
    thetas = [np.atleast_1d(np.asarray(p["theta"], dtype=float)) for p in points]
    idx = [i for i, t in enumerate(thetas) if t.shape == theta.shape and np.allclose(t, theta)]
    if not idx:
        raise PoissonQIError("theta is not one of the explicit grid points")
    i = idx[0]
    G = io.intensity_from_doc(points[i]["gamma"])
    if "dgamma" in points[i]:
        dGs = [io.matrix_from_doc(d) for d in points[i]["dgamma"]]
        return G, estimation.helstrom_from_derivatives(G, dGs, tol_supp)
    if theta.size != 1:
        raise PoissonQIError("multi-parameter explicit families need 'dgamma' entries")
    order = np.argsort([t[0] for t in thetas])
    pos = int(np.where(order == i)[0][0])
    if pos == 0 or pos == len(order) - 1:
        raise PoissonQIError("finite differences need grid points on both sides of theta")
    lo, hi = order[pos - 1], order[pos + 1]
    t0, t1, t2 = thetas[lo][0], theta[0], thetas[hi][0]
    g0 = io.intensity_from_doc(points[lo]["gamma"]).matrix
    g2 = io.intensity_from_doc(points[hi]["gamma"]).matrix
    h1, h2 = t1 - t0, t2 - t1
    # three-point derivative on a nonuniform grid
    d = (-h2 / (h1 * (h1 + h2))) * g0 + ((h2 - h1) / (h1 * h2)) * G.matrix \
        + (h1 / (h2 * (h1 + h2))) * g2
    return G, estimation.helstrom_from_derivatives(G, [(d + d.conj().T) / 2], tol_supp)


def cmd_helstrom(args) -> int:
    theta = np.asarray(_floats(args.theta))
    kind, fam = _family_from_doc(io.load_json(args.family), theta.size)
    if kind == "imaging":
        N0, g, delta = fam
        if theta.size != 1:
            raise PoissonQIError("the imaging family has a single parameter")
        K = imaging.helstrom_gram(N0, g, float(theta[0]), delta)
        doc = {"K": [[K]], "N": imaging.expected_photon_number(N0, g, float(theta[0])),
               "K_normalized": K / (N0 / 2) if N0 > 0 else math.nan}
    elif kind == "family":
        H = estimation.helstrom(fam, theta, args.fd_step, args.tol_supp)
        doc = {"K": H.K, "N": IntensityOperator(validate_psd(fam.gamma_of(theta))).N}
    else:
        G, H = _explicit_helstrom(fam, theta, args.fd_step, args.tol_supp)
        doc = {"K": H.K, "N": G.N}
    print(io.dumps(doc))
    return 0


def cmd_channel(args) -> int:
    G = io.load_intensity(args.gamma)
    ch = io.channel_from_doc(io.load_json(args.spec), G.dim)
    out = channels.apply(ch, G)
    if isinstance(out, IntensityOperator):
        doc = io.matrix_to_doc(out.matrix)
        doc["N"] = out.N
    else:
        doc = {"intensities": out, "N": float(out.sum())}
    print(io.dumps(doc))
    return 0


def cmd_converge(args) -> int:
    tau1 = as_density(io.load_matrix(args.tau1))
    tau1p = as_density(io.load_matrix(args.tau1p))
    G = intensity_from_density(tau1, args.n)
    G2 = intensity_from_density(tau1p, args.nprime)
    Ms = _floats(args.m_list)
    if args.kind == "helstrom":
        # linear path Gamma(t) = (1 - t) Gamma + t Gamma'
        fam = estimation.ParamFamily(lambda t: (1 - t[0]) * G.matrix + t[0] * G2.matrix,
                                     lambda t: [G2.matrix - G.matrix])
        rows = oracle.helstrom_convergence_sweep(
            oracle.RareFamily.from_intensity_family(fam), [args.theta], Ms, args.fd_step)
    else:
        rows = oracle.convergence_sweep(G, G2, Ms, args.kind, args.s)
    _write(_csv(["M", "finite", "limit", "abs_error"],
                [(r.M, r.finite, r.limit, r.abs_error) for r in rows]), args.out)
    return 0


def cmd_sample(args) -> int:
    L = io.parse_vector(args.lam)
    batch = kac.sample(L, args.trials, args.seed, args.workers)
    header = [f"n{j + 1}" for j in range(L.size)]
    lines = [",".join(header)] + [",".join(map(str, row)) for row in batch.counts.tolist()]
    _write("\n".join(lines) + "\n", args.out)
    return 0


def cmd_imaging_sweep(args) -> int:
    n = int(round((args.theta_max - args.theta_min) / args.theta_step)) + 1
    thetas = args.theta_min + args.theta_step * np.arange(n)
    gammas = _complexes(args.gamma_list) if args.gamma_list else imaging.default_gamma_grid()
    cfg = imaging.ImagingConfig(N0=args.n0, theta_grid=thetas, gamma_grid=gammas,
                                delta_reg=args.delta)
    res = imaging.helstrom_sweep(cfg)
    _write(_csv(["gamma", "theta", "K_normalized"], res.rows()), args.out)
    return 0


# --- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    tol = argparse.ArgumentParser(add_help=False)
    tol.add_argument("--tol-herm", type=float, default=TOL_HERM,
                     help=f"relative Hermiticity tolerance (default {TOL_HERM:g})")
    tol.add_argument("--tol-psd", type=float, default=TOL_PSD,
                     help=f"relative negative-eigenvalue tolerance (default {TOL_PSD:g})")
    tol.add_argument("--tol-supp", type=float, default=TOL_SUPP,
                     help=f"relative support threshold (default {TOL_SUPP:g})")

    p = argparse.ArgumentParser(prog="poissonqi", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[tol], help="check that a matrix is PSD")
    s.add_argument("--matrix", required=True)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("divergence", parents=[tol], help="divergence between two operands")
    s.add_argument("--kind", required=True,
                   choices=["fidelity", "bures", "chernoff", "chernoff-distance", "alpha", "kl"])
    s.add_argument("--s", type=float, default=None)
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--classical", action="store_true",
                   help="operands are intensity vectors (file or inline list)")
    s.add_argument("--tol-s", type=float, default=divergences.TOL_S)
    s.set_defaults(func=cmd_divergence)

    s = sub.add_parser("helstrom", parents=[tol], help="Helstrom information matrix")
    s.add_argument("--family", required=True)
    s.add_argument("--theta", required=True, help="comma-separated parameter values")
    s.add_argument("--fd-step", type=float, default=estimation.FD_STEP)
    s.set_defaults(func=cmd_helstrom)

    s = sub.add_parser("channel", parents=[tol], help="apply a Poisson channel")
    s.add_argument("--spec", required=True)
    s.add_argument("--gamma", required=True)
    s.set_defaults(func=cmd_channel)

    s = sub.add_parser("converge", parents=[tol], help="finite-M convergence table")
    s.add_argument("--kind", required=True, choices=["fidelity", "chernoff", "kl", "helstrom"])
    s.add_argument("--n", type=float, required=True)
    s.add_argument("--nprime", type=float, required=True)
    s.add_argument("--tau1", required=True)
    s.add_argument("--tau1p", required=True)
    s.add_argument("--m-list", required=True)
    s.add_argument("--s", type=float, default=0.5)
    s.add_argument("--theta", type=float, default=0.5,
                   help="interpolation point for --kind helstrom")
    s.add_argument("--fd-step", type=float, default=estimation.FD_STEP)
    s.add_argument("--out")
    s.set_defaults(func=cmd_converge)

    s = sub.add_parser("sample", help="Kac-process count samples")
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("imaging-sweep", help="Helstrom information of two sources")
    s.add_argument("--theta-min", type=float, default=imaging.THETA_STEP)
    s.add_argument("--theta-max", type=float, default=imaging.THETA_STEP * imaging.THETA_COUNT)
    s.add_argument("--theta-step", type=float, default=imaging.THETA_STEP)
    s.add_argument("--gamma-list", default=None,
                   help="comma-separated degrees of coherence, complex allowed (0.3+0.4j)")
    s.add_argument("--delta", type=float, default=estimation.DELTA_REG)
    s.add_argument("--n0", type=float, default=1.0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_imaging_sweep)
    return p


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except (PoissonQIError, ValueError, KeyError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
