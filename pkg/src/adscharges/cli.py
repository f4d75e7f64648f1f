"""Command-line interface: charge pipelines, verification suites, reports.

Commands:
  charges    full energy-momentum / Q pipeline on a named family or grid file
  verify     self-contained invariant suites (algebra, causality, sweeps)
  normalize  orbit normal form from explicit (M, Xi) components
  deccheck   sampled dominant-energy verdicts for a family

Exit codes: 0 success, 1 verdict/suite failure, 2 configuration error,
3 precondition failure (e.g. mass part not timelike).

Reports are JSON, schema 1, deterministic for a given (config, seed); all
floats are emitted with 17 significant digits so that parsing and
re-emitting a report is byte-identical.
"""

import argparse
import sys

import numpy as np

from . import charges as charges_mod
from . import families as families_mod
from . import positivity as positivity_mod
from . import spin as spin_mod
from .geometry import ChartPoint, random_chart_point
from .quadrature import SphereQuadrature

__all__ = ["main", "build_parser", "cmd_charges", "cmd_verify",
           "cmd_normalize", "cmd_deccheck", "serialize_report"]

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3


# -- canonical JSON ----------------------------------------------------------

def _fmt_float(x):
    if x != x or x in (float("inf"), float("-inf")):
        return '"%s"' % repr(x)
    s = format(float(x), ".17g")
    if "." not in s and "e" not in s and "E" not in s:
        s += ".0"
    return s


def _ser(obj, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(obj))
    elif isinstance(obj, (complex, np.complexfloating)):
        out.append("[" + _fmt_float(obj.real) + ", " + _fmt_float(obj.imag) + "]")
    elif isinstance(obj, str):
        import json

        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            import json

            out.append(json.dumps(str(k)) + ": ")
            _ser(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        if isinstance(seq, (complex, float, int)):  # 0-d array
            _ser(seq, out)
            return
        out.append("[")
        for i, v in enumerate(seq):
            if i:
                out.append(", ")
            _ser(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)}")


def serialize_report(report):
    out = []
    _ser(report, out)
    return "".join(out) + "\n"


def _cmatrix(A):
    """2x2 (or 4x4) complex matrix as nested [re, im] pairs."""
    A = np.asarray(A, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in A]


def _emit(report, out_path):
    text = serialize_report(report)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- config ------------------------------------------------------------------

class ConfigError(ValueError):
    pass


def _parse_params(items):
    params = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--param expects key=value, got '{item}'")
        key, val = item.split("=", 1)
        try:
            params[key] = float(val)
        except ValueError:
            params[key] = val
    return params


def _parse_schedule(text):
    try:
        sched = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad schedule '{text}'") from exc
    if len(sched) < 3 or any(b <= a for a, b in zip(sched, sched[1:])):
        raise ConfigError("schedule must be strictly increasing, length >= 3")
    return sched


def _load_family(args):
    if getattr(args, "grid", None):
        return families_mod.builtin_family("grid", {"path": args.grid})
    if not getattr(args, "family", None):
        raise ConfigError("either --family or --grid is required")
    return families_mod.builtin_family(args.family, _parse_params(args.param))


def _quad_from(args):
    if args.quad_theta < 2 or args.quad_phi < 4:
        raise ConfigError("quadrature orders too small")
    return SphereQuadrature.build(3, args.quad_theta, args.quad_phi)


# -- charges command ---------------------------------------------------------

def cmd_charges(args):
    data = _load_family(args)
    schedule = _parse_schedule(args.schedule)
    if args.tol <= 0:
        raise ConfigError("tolerance must be positive")
    quad = _quad_from(args)
    rng = np.random.default_rng(args.seed)

    em = charges_mod.energy_momentum(data, schedule, args.tol, quad)
    Q_pol, q_diags = charges_mod.q_assemble_from_charges(
        data, schedule, args.tol, quad
    )
    Q_comp = charges_mod.q_from_components(em.M, em.Xi)
    cross = float(np.max(np.abs(Q_pol - Q_comp)))

    minfo = positivity_mod.minors_check(Q_pol)
    psd = positivity_mod.psd_oracle(Q_pol)

    normal_form = None
    reduced = None
    try:
        nf = positivity_mod.normalize(em)
        lhs, rhs, verdict = positivity_mod.reduced_inequality(nf)
        normal_form = {
            "m0": nf.m0, "n1": nf.n1, "r1": nf.r1, "r2": nf.r2,
            "transform": _cmatrix(nf.transform),
        }
        reduced = {"lhs": lhs, "rhs": rhs, "verdict": verdict}
    except positivity_mod.NotTimelikeError as exc:
        normal_form = {"error": str(exc)}

    dec = _dec_sample(data, args.samples, rng)
    probe_radii = np.linspace(schedule[0] - 1.5, schedule[0] + 1.0, 6)
    probe = families_mod.integrability_probe(data, probe_radii, seed=args.seed)

    couple_names = [f"x{k}" for k in range(4)] + [
        f"boost{i}" for i in range(1, 4)
    ] + ["rot12", "rot13", "rot23"]
    per_charge = [
        {
            "name": name,
            "values": d["values"],
            "diffs": d["diffs"],
            "converged": d["converged"],
            "estimate": d["estimate"],
        }
        for name, d in zip(couple_names, em.diagnostics)
    ]

    report = {
        "schema": 1,
        "command": "charges",
        "config": {
            "family": data.name,
            "schedule": schedule,
            "tol": args.tol,
            "quad": [args.quad_theta, args.quad_phi],
            "seed": args.seed,
        },
        "mass_vector": em.mass_vector,
        "angular": em.angular,
        "M": _cmatrix(em.M),
        "Xi": _cmatrix(em.Xi),
        "N": _cmatrix(em.N),
        "R": _cmatrix(em.R),
        "Q": _cmatrix(Q_pol),
        "cross_path_residual": cross,
        "charges": per_charge,
        "minors": [
            {"rows": list(rows), "value": val}
            for rows, val in minfo["minors"].items()
        ],
        "positivity": minfo["verdict"],
        "psd": psd,
        "normal_form": normal_form,
        "reduced_inequality": reduced,
        "dec": dec,
        "integrability": {
            "radii": probe["radii"],
            "probes": probe["probes"],
            "rate": float(probe["rate"]),
            "integrable": bool(probe["integrable"]),
        },
    }
    if data.name == "schwarzschild_ads":
        m = _parse_params(args.param).get("m", 1.0)
        if m > 0:
            report["c3"] = float(em.mass_vector[0] / m)
    _emit(report, args.out)
    failed = (
        minfo["verdict"] == "negative"
        or dec["verdict"] == "violated"
        or (reduced is not None and reduced["verdict"] == "fails")
    )
    return EXIT_VERDICT if failed else EXIT_OK


def _dec_sample(data, samples, rng):
    counts = {"satisfied": 0, "marginal": 0, "violated": 0}
    for _ in range(samples):
        p = random_chart_point(rng, n=data.n, r_range=(1.0, 5.0))
        d = families_mod.constraint_deficit(data, p)
        counts[families_mod.dec_check(d, data.metric(p))] += 1
    verdict = "violated" if counts["violated"] else "satisfied"
    return {"samples": samples, **counts, "verdict": verdict}


# -- verify command ----------------------------------------------------------

def _suite_algebra(rng, theta_fn):
    worst = 0.0
    for _ in range(1000):
        y = rng.normal(size=4)
        L = spin_mod.lambda_iso(y)
        q = -y[0] ** 2 + y[1:] @ y[1:]
        worst = max(worst, abs(-np.linalg.det(L).real - q))
        worst = max(worst, float(np.max(np.abs(
            spin_mod.lambda_inv(L) - y))))
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        worst = max(worst, float(np.max(np.abs(
            A @ spin_mod.adjugate(A) - np.linalg.det(A) * np.eye(2)))))
        X = A + A.conj().T
        th = theta_fn(X)
        worst = max(worst, float(np.max(np.abs(
            th @ th - 4.0 * np.linalg.det(X).real * np.eye(4)))))
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        g = g / np.sqrt(np.linalg.det(g))
        h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        h = h / np.sqrt(np.linalg.det(h))
        mg, mh = spin_mod.mu_cover(g), spin_mod.mu_cover(h)
        eta = np.diag([-1.0, 1, 1, 1])
        worst = max(worst, float(np.max(np.abs(mg.T @ eta @ mg - eta))))
        worst = max(worst, float(np.max(np.abs(
            spin_mod.mu_cover(g @ h) - mg @ mh))))
    return worst <= 1e-10, worst


def _suite_causality(rng):
    worst = 0.0
    for _ in range(2000):
        d = spin_mod.SpinorData(
            rng.normal(size=2) + 1j * rng.normal(size=2),
            rng.normal(size=2) + 1j * rng.normal(size=2),
        )
        U, V = d.cap_u, d.cap_v
        nu, nv = np.vdot(U, U).real, np.vdot(V, V).real
        worst = max(worst, (abs(np.vdot(U, V)) ** 2 - nu * nv)
                    / max(1e-30, (nu * nv)))
    return worst <= 1e-12, worst


def _suite_equivariance(rng):
    worst = 0.0
    for _ in range(100):
        d = spin_mod.SpinorData(
            rng.normal(size=2) + 1j * rng.normal(size=2),
            rng.normal(size=2) + 1j * rng.normal(size=2),
        )
        e = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        e = e / np.sqrt(np.linalg.det(e))
        c1, A1 = spin_mod.k_map(d.transformed(e))
        c2, A2 = spin_mod.k_map(d)
        mu_inv = spin_mod.mu_cover(np.linalg.inv(e))
        # V-coefficients: c1 . x = c2 . (mu(e^{-1}) x) => c1 = mu(e^{-1})^T c2
        worst = max(worst, float(np.max(np.abs(c1 - mu_inv.T @ c2)))
                    / max(1.0, float(np.max(np.abs(c1)))))
        # pairing matrix: A -> (e*)^{-1} ... alpha'(xi) = alpha(e* xi (e*)^{-1})
        estar = e.conj().T
        A2t = np.linalg.inv(estar) @ A2 @ estar
        worst = max(worst, float(np.max(np.abs(A1 - A2t)))
                    / max(1.0, float(np.max(np.abs(A1)))))
    return worst <= 1e-10, worst


def _suite_alpha_identity(rng):
    worst = 0.0
    for _ in range(200):
        d = spin_mod.SpinorData(
            rng.normal(size=2) + 1j * rng.normal(size=2),
            rng.normal(size=2) + 1j * rng.normal(size=2),
        )
        z = rng.normal(size=3)
        zeta = (z[0] * spin_mod.SIGMA1 + z[1] * spin_mod.SIGMA2
                + z[2] * spin_mod.SIGMA3)
        val = spin_mod.alpha_field(d, np.eye(2), zeta)
        ref = 4.0 * np.real(np.vdot(d.w, zeta @ d.u))
        worst = max(worst, abs(val - ref) / max(1.0, abs(ref)))
        # section independence under a random SU(2) right factor
        a = rng.normal(size=3)
        a = a / np.linalg.norm(a)
        t = rng.uniform(0, np.pi)
        s = (np.cos(t) * np.eye(2) + 1j * np.sin(t)
             * (a[0] * spin_mod.SIGMA1 + a[1] * spin_mod.SIGMA2
                + a[2] * spin_mod.SIGMA3))
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        g = g / np.sqrt(np.linalg.det(g))
        W = g @ g.conj().T
        gs = spin_mod.hermitian_sqrt(W)
        v1 = spin_mod.alpha_field(d, gs, zeta)
        # same geometric tangent: the frame representative co-rotates
        v2 = spin_mod.alpha_field(d, gs @ s, s.conj().T @ zeta @ s)
        worst = max(worst, abs(v1 - v2) / max(1.0, abs(v1)))
    return worst <= 1e-10, worst


def _suite_minors_psd(rng):
    disagree = 0
    for _ in range(2000):
        A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        Q = A + A.conj().T
        ev = np.linalg.eigvalsh(Q)
        if np.min(np.abs(ev)) < 1e-6:
            continue
        m = positivity_mod.minors_check(Q)["verdict"] == "non-negative"
        p = positivity_mod.psd_oracle(Q) == "psd"
        disagree += m != p
    return disagree == 0, disagree


def _suite_reduced_psd(rng):
    disagree = 0
    for _ in range(2000):
        m0 = rng.uniform(0.05, 3.0)
        n1, r1, r2 = rng.uniform(-3, 3, size=3)
        nf = positivity_mod.NormalForm(m0, n1, r1, r2, np.eye(2, dtype=complex))
        lhs, rhs, verdict = positivity_mod.reduced_inequality(nf)
        if abs(lhs - rhs) < 1e-7:
            continue
        p = positivity_mod.psd_oracle(nf.q()) == "psd"
        disagree += (verdict == "holds") != p
    return disagree == 0, disagree


def cmd_verify(args):
    rng = np.random.default_rng(args.seed)
    theta_fn = spin_mod.clifford_theta
    if args.corrupt_theta:
        base = spin_mod.clifford_theta
        theta_fn = lambda X: base(X) + 1e-3  # fault-injection hook
    suites = [
        ("algebra", lambda: _suite_algebra(rng, theta_fn)),
        ("causality", lambda: _suite_causality(rng)),
        ("equivariance", lambda: _suite_equivariance(rng)),
        ("alpha_identity", lambda: _suite_alpha_identity(rng)),
        ("minors_vs_psd", lambda: _suite_minors_psd(rng)),
        ("reduced_vs_psd", lambda: _suite_reduced_psd(rng)),
    ]
    results = []
    all_ok = True
    for name, fn in suites:
        ok, metric = fn()
        results.append({"suite": name, "passed": bool(ok),
                        "metric": float(metric)})
        all_ok = all_ok and ok
    report = {
        "schema": 1,
        "command": "verify",
        "config": {"seed": args.seed, "corrupt_theta": bool(args.corrupt_theta)},
        "suites": results,
        "passed": bool(all_ok),
    }
    _emit(report, args.out)
    return EXIT_OK if all_ok else EXIT_VERDICT


# -- normalize command -------------------------------------------------------

def cmd_normalize(args):
    mv = [float(v) for v in args.m.split(",")]
    xf = [float(v) for v in args.xi.split(",")]
    if len(mv) != 4 or len(xf) != 8:
        raise ConfigError("--m expects 4 reals, --xi expects 8 reals "
                          "(row-major re,im pairs of the 2x2 matrix)")
    Xi = np.array([[xf[0] + 1j * xf[1], xf[2] + 1j * xf[3]],
                   [xf[4] + 1j * xf[5], xf[6] + 1j * xf[7]]])
    if abs(np.trace(Xi)) > 1e-9 * max(1.0, float(np.max(np.abs(Xi)))):
        raise ConfigError("Xi must be trace free")
    em = charges_mod.EnergyMomentum(np.asarray(mv), np.zeros(6))
    em.Xi = Xi
    try:
        nf = positivity_mod.normalize(em)
    except positivity_mod.NotTimelikeError as exc:
        _emit({"schema": 1, "command": "normalize", "error": str(exc)},
              args.out)
        return EXIT_PRECONDITION
    lhs, rhs, verdict = positivity_mod.reduced_inequality(nf)
    Q = charges_mod.q_from_components(em.M, em.Xi)
    report = {
        "schema": 1,
        "command": "normalize",
        "input": {"m": mv, "xi": xf},
        "normal_form": {"m0": nf.m0, "n1": nf.n1, "r1": nf.r1, "r2": nf.r2,
                        "transform": _cmatrix(nf.transform)},
        "reduced_inequality": {"lhs": lhs, "rhs": rhs, "verdict": verdict},
        "psd": positivity_mod.psd_oracle(Q),
    }
    _emit(report, args.out)
    return EXIT_OK if verdict != "fails" else EXIT_VERDICT


# -- deccheck command --------------------------------------------------------

def cmd_deccheck(args):
    data = _load_family(args)
    rng = np.random.default_rng(args.seed)
    dec = _dec_sample(data, args.samples, rng)
    report = {
        "schema": 1,
        "command": "deccheck",
        "config": {"family": data.name, "samples": args.samples,
                   "seed": args.seed},
        "dec": dec,
    }
    _emit(report, args.out)
    return EXIT_OK if dec["verdict"] == "satisfied" else EXIT_VERDICT


# -- parser ------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="adscharges",
        description="Energy-momentum charges of asymptotically hyperbolic "
                    "initial data, with positivity verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_family(p):
        p.add_argument("--family", help="built-in family name")
        p.add_argument("--param", action="append", default=[],
                       help="family parameter key=value (repeatable)")
        p.add_argument("--grid", help="path to a grid JSON file")

    pc = sub.add_parser("charges", help="full charge/Q pipeline")
    add_family(pc)
    pc.add_argument("--schedule", default="4,5,6,7,8")
    pc.add_argument("--tol", type=float, default=1e-6)
    pc.add_argument("--quad-theta", type=int, default=24)
    pc.add_argument("--quad-phi", type=int, default=48)
    pc.add_argument("--samples", type=int, default=20,
                    help="DEC sample count")
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--out", help="report path (default stdout)")
    pc.set_defaults(func=cmd_charges)

    pv = sub.add_parser("verify", help="invariant suites")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--corrupt-theta", action="store_true",
                    help="fault-injection hook for the Clifford suite")
    pv.add_argument("--out", help="report path (default stdout)")
    pv.set_defaults(func=cmd_verify)

    pn = sub.add_parser("normalize", help="orbit normal form")
    pn.add_argument("--m", required=True, help="4 reals, comma separated")
    pn.add_argument("--xi", required=True,
                    help="8 reals: row-major re,im pairs of the 2x2 matrix")
    pn.add_argument("--out", help="report path (default stdout)")
    pn.set_defaults(func=cmd_normalize)

    pd = sub.add_parser("deccheck", help="sampled dominant-energy check")
    add_family(pd)
    pd.add_argument("--samples", type=int, default=100)
    pd.add_argument("--seed", type=int, default=0)
    pd.add_argument("--out", help="report path (default stdout)")
    pd.set_defaults(func=cmd_deccheck)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, families_mod.UnknownFamilyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except charges_mod.ChargeConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERDICT


if __name__ == "__main__":
    sys.exit(main())
