"""Command-line front end.

Every subcommand writes one data artifact (CSV by default, JSON with
``--format json``) to standard output, or into ``--out DIR`` under a
fixed file name.  ``report all`` regenerates every data series, runs the
acceptance checks and writes ``manifest.json``.

Exit codes: 0 success, 1 acceptance miss in ``report all``, 2 usage or
domain error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acceptance, auth, channels, dl04game, keyagree, keydist
from .keydist import SolverError

DEFAULT_SEED = 0xD104
DEFAULT_ROUNDS = 100_000


# ---------------------------------------------------------------------------
# Output


def _plain(v):
    """Turn numpy scalars, fractions and tuples into JSON-friendly values."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating, Fraction)):
        return float(v)
    return v


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        text = f"{v:.6f}"
        return "0.000000" if text == "-0.000000" else text
    return str(v)


class Table(list):
    """Rows with a fixed column order, so an empty result still has a header."""

    def __init__(self, rows, columns):
        super().__init__(rows)
        self.columns = tuple(columns)


def render(data, fmt: str) -> str:
    """CSV: header then rows, floats with 6 decimals.  JSON: sorted keys."""
    header = list(getattr(data, "columns", ()))
    data = _plain(data)
    if fmt == "json":
        return json.dumps(data, sort_keys=True, indent=2) + "\n"
    rows = data if isinstance(data, list) else [data]
    for r in rows:
        header += [k for k in r if k not in header]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(r.get(k)) for k in header])
    return buf.getvalue()


def emit(data, args, name: str) -> str | None:
    text = render(data, args.format)
    if args.out is None:
        sys.stdout.write(text)
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.{args.format}"
    path.write_text(text)
    return path.name


def rng_for(seed: int, idx: int) -> np.random.Generator:
    return np.random.default_rng([seed, idx])


def _alpha(args, default=np.pi / 2) -> float:
    if args.alpha_deg is not None and args.alpha_rad is not None:
        raise ValueError("give only one of --alpha-deg and --alpha-rad")
    if args.alpha_deg is not None:
        return math.radians(args.alpha_deg)
    if args.alpha_rad is not None:
        return args.alpha_rad
    return default


def _game(text: str) -> tuple:
    parts = tuple(s.strip().upper() for s in text.split("-"))
    if len(parts) not in (1, 2) or any(a not in dl04game.ATTACKS for a in parts):
        raise ValueError(f"game must look like e1-e2, got {text!r}")
    return parts


# ---------------------------------------------------------------------------
# auth


def _random_key(which: str, n: int, rng) -> list:
    if n < 1:
        raise ValueError("--n must be at least 1")
    length = {"2.1": 2 * n, "2.2": 4 * n, "2.3": 2 * (n + 1), "2.4": 2 * n}[which]
    return [int(b) for b in rng.integers(0, 2, length)]


def cmd_auth_detect(args):
    ns = [args.n] if args.n is not None else list(range(1, 13))
    if any(n < 0 for n in ns):
        raise ValueError("--n must be non-negative")
    return [{"n": n, "p_detect": auth.detect_probability(n)} for n in ns]


def cmd_auth_simulate(args):
    rng = rng_for(args.seed, 0)
    rows, accepted, err = [], 0, 0.0
    for s in range(args.sessions):
        tr = auth.simulate_protocol(args.protocol, _random_key(args.protocol, args.n, rng),
                                    args.adversary, rng)
        accepted += tr.verdict == "accept"
        err += tr.error_rate
    rows.append({
        "protocol": args.protocol, "adversary": args.adversary, "n": args.n,
        "sessions": args.sessions, "accept_rate": accepted / args.sessions,
        "mean_error_rate": err / args.sessions,
    })
    return rows


def cmd_auth_attack(args):
    if args.kind == "measure-resend":
        if args.protocol not in ("2.1", "2.2"):
            raise ValueError("measure-resend analysis covers protocols 2.1 and 2.2")
        return [{"protocol": args.protocol, "eve_policy": pol, **auth.measure_resend_analysis(args.protocol, pol)}
                for pol in ("random", "matched")]
    if args.kind == "fake-state":
        rows = []
        for which in auth.OPTIMAL_FAKE:
            r = auth.fake_state_detection(which, auth.OPTIMAL_FAKE[which])
            rows.append({"case": which, "quantity": "pass" if which == "2.4" else "detect",
                         "oracle": r["oracle"], "closed_form": r["closed_form"]})
        return rows
    rng = rng_for(args.seed, 0)
    p = auth.impersonation_accept_rate(args.protocol, args.n, args.rounds, rng)
    return [{"protocol": args.protocol, "n": args.n, "trials": args.rounds,
             "round_pass": auth.impersonation_round_pass(args.protocol),
             "reject_rate": 1 - p, "p_detect": auth.detect_probability(args.n)}]


# ---------------------------------------------------------------------------
# qkd

_CURVES = {"sb1": "SB1", "sb1y": "SB1_Y", "sb2": "SB2", "sb2x": "SB2_X"}


def _qkd_rate_rows(curve: str, step: float):
    if curve in _CURVES:
        return [{"E": e, "rate": r} for e, r in keydist.rate_curve(_CURVES[curve], step)]
    which = curve.split("-")[1]
    rows = []
    for e in np.round(np.arange(step, 0.5, step), 12):
        b = keydist.dw_bounds(float(e))
        rows.append({"E": float(e), "rate": b[f"{which}_rate"], "q": b[f"q_{which}"]})
    return rows


def cmd_qkd_rate(args):
    return _qkd_rate_rows(args.curve, args.step)


def cmd_qkd_threshold(args):
    if args.curve in _CURVES:
        root = keydist.threshold(_CURVES[args.curve])
    else:
        root = keydist.bound_threshold(args.curve.split("-")[1], tol=args.tol or 1e-7)
    return {"curve": args.curve, "root": root}


def cmd_qkd_pns(args):
    if args.series:
        return [{"scenario": s, "length_km": l, "eve_information": i}
                for s in ("P1", "P2") for l, i in keydist.pns_curve(s)]
    return [keydist.pns_critical(s) for s in ("P1", "P2")]


def cmd_qkd_efficiency(args):
    rows = []
    for name, (b_s, q_t, b_t) in keydist.EFFICIENCY_INPUTS.items():
        rows.append({"protocol": name, "b_s": b_s, "q_t": q_t, "b_t": b_t,
                     "efficiency": keydist.cabello_efficiency(b_s, q_t, b_t)})
    rows.append({"protocol": "3.2 secret bits", "b_s": keydist.protocol32_secret_bits()})
    return rows


def cmd_qkd_simulate(args):
    r = keydist.simulate_rounds(args.protocol, args.rounds, rng_for(args.seed, 0))
    return {"protocol": args.protocol, "rounds": r["n"], "kept": r["kept"], "errors": r["errors"],
            "error_rate": r["errors"] / r["kept"] if r["kept"] else 0.0,
            "intrinsic_error": float(keydist.intrinsic_error(args.protocol))}


def _sift_rows():
    rows = []
    for (s_a, bob, r1, r2), p in sorted(keydist.enumerate_rows().items()):
        rec31 = keydist.sift("3.1", s_a, r1, r2, bob)
        rec32 = keydist.sift("3.2", s_a, r1, r2, bob)
        rows.append({"S_A": s_a, "S_B1": bob, "r_B1": r1, "r_B2": r2, "probability": float(p),
                     "result_3.1": rec31.result, "result_3.2": rec32.result})
    return rows


# ---------------------------------------------------------------------------
# qka


def cmd_qka_simulate(args):
    rounds = keyagree.simulate_cqka(args.rounds, args.variant, rng_for(args.seed, 0))
    n = len(rounds)
    return {"variant": args.variant, "rounds": n,
            "agreement_rate": sum(r.key_alice == r.key_bob for r in rounds) / n,
            "ones_fraction": sum(r.key for r in rounds) / n}


def cmd_qka_attack(args):
    a = _alpha(args)
    prm = keyagree.AncillaParams(alpha_zeta=a, alpha_eta=a, beta_zeta=a, beta_eta=a)
    return {"alpha": a, **keyagree.collective_attack_stats(prm, n=args.n)}


def cmd_qka_bound(args):
    a = _alpha(args)
    return {"alpha": a, "mode": args.mode, "root": keyagree.dw_tolerable_qber(a, args.mode)}


def _qka_alpha_rows():
    rows = []
    for deg in range(0, 91, 5):
        a = math.radians(deg)
        prm = keyagree.AncillaParams(alpha_zeta=a, alpha_eta=a, beta_zeta=a, beta_eta=a)
        st = keyagree.collective_attack_stats(prm)
        rows.append({"alpha_deg": deg, "d_printed": st["d_printed"], "d_oracle": st["d_oracle"],
                     "eve_information": st["I"], "eve_key_error": st["Q_EK"]})
    return rows


def _qka_bound_rows():
    rows = []
    for deg in range(10, 91, 10):
        s = keyagree.dw_summary(math.radians(deg))
        rows.append({"alpha_deg": deg, "reproduction": s["reproduction"], "oracle": s["oracle"]})
    return rows


# ---------------------------------------------------------------------------
# dl04


def cmd_dl04_dist(args):
    J = dl04game.joint_array(args.attack.upper(), args.p, args.q)
    return [{"j": j, "m": m, "k": k, "probability": float(J[j, m, k])}
            for j in (0, 1) for m in (0, 1) for k in (0, 1)]


def cmd_dl04_payoff(args):
    game = _game(args.game)
    pay = dl04game.mixed_payoff(game, args.p, args.q, args.r)
    return {"game": "-".join(game), "p": args.p, "q": args.q, "r": args.r,
            "P_A": pay.P_A, "P_B": pay.P_B, "P_E": pay.P_E,
            "expected_qber": float(dl04game.expected_qber(game, args.p, args.q, args.r))}


def _nash_rows(game, eq):
    return [{"game": "-".join(game), **{k: v for k, v in e.to_dict().items()}} for e in eq]


NASH_COLUMNS = ("game", "p", "q", "r", "P_A", "P_B", "P_E", "payoff_difference", "expected_qber",
                "residual_A", "residual_B", "residual_E", "cluster_size")


def cmd_dl04_nash(args):
    game = _game(args.game)
    eq = dl04game.find_equilibria(game, grid_n=args.grid, refine_tol=args.tol or 1e-4)
    return Table(_nash_rows(game, eq), NASH_COLUMNS)


def cmd_dl04_bound(args):
    b = dl04game.secure_bound(dl04game.GAMES, grid_n=args.grid)
    rows = [{"game": g, "min_expected_qber": v} for g, v in sorted(b["per_game"].items())]
    rows.append({"game": "global", "min_expected_qber": b["global"]})
    return rows


def _table52_rows():
    rows = []
    for game in dl04game.GAMES:
        for r in dl04game.table_check(game):
            rows.append({"game": "-".join(game), **r})
    return rows


# ---------------------------------------------------------------------------
# noise


def cmd_noise_fidelity(args):
    kind = args.kind.upper()
    rows = channels.fidelity_curve(kind, step=args.step, alpha=args.memory)
    name = "eta" if kind in ("AD", "PD") else "p"
    return [{"kind": kind, name: x, "fidelity": f, "printed_form": pr} for x, f, pr in rows]


def cmd_noise_collective(args):
    angles = np.round(np.arange(0, np.pi / 2 + 1e-12, args.step), 12)
    return [{"kind": args.kind, "angle": float(a),
             "error_probability": float(channels.collective_error_probability(args.kind, a))}
            for a in angles]


# ---------------------------------------------------------------------------
# report all


def _sha(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def report_all(args) -> int:
    out = Path(args.out or "report")
    out.mkdir(parents=True, exist_ok=True)
    sub = argparse.Namespace(**vars(args))
    sub.out = str(out)
    files = []

    def put(name, data, source):
        files.append({"file": emit(data, sub, name), "source": source})

    rng = rng_for(args.seed, 1)
    rows = []
    for n in range(1, 13):
        row = {"n": n, "p_detect": auth.detect_probability(n)}
        for w in ("2.1", "2.2", "2.3", "2.4"):
            row[f"mc_reject_{w}"] = 1 - auth.impersonation_accept_rate(w, n, args.rounds, rng)
        rows.append(row)
    put("auth_detect", rows, "auth.detect_probability, auth.impersonation_accept_rate")
    put("auth_measure_resend",
        [{"protocol": w, "eve_policy": pol, **auth.measure_resend_analysis(w, pol)}
         for w in ("2.1", "2.2") for pol in ("random", "matched")],
        "auth.measure_resend_analysis")
    put("auth_fake_state",
        [{"case": w, **auth.fake_state_detection(w, auth.OPTIMAL_FAKE[w])} for w in auth.OPTIMAL_FAKE],
        "auth.fake_state_detection")
    put("auth_table_26", [{"r14": a, "r23": b} for a, b in sorted(auth.table_26_rows())],
        "auth.outcomes_23")
    put("auth_table_28", [{"r14": a, "r23": b, "r5": c} for a, b, c in sorted(auth.table_28_rows())],
        "auth.outcomes_24")
    put("qkd_rates", [{"curve": c, **r} for c in ("sb1", "sb1y", "sb2", "sb2x")
                      for r in _qkd_rate_rows(c, 0.005)], "keydist.key_rate")
    put("qkd_dw_bounds", [{"curve": c, **r} for c in ("dw-lower", "dw-upper")
                          for r in _qkd_rate_rows(c, 0.01)], "keydist.dw_bounds")
    put("qkd_pns", [{"scenario": s, "length_km": l, "eve_information": i}
                    for s in ("P1", "P2") for l, i in keydist.pns_curve(s)], "keydist.pns_curve")
    put("qkd_sifting", _sift_rows(), "keydist.enumerate_rows, keydist.sift")
    put("qkd_efficiency", cmd_qkd_efficiency(args), "keydist.cabello_efficiency")
    cols = ("k_C", "k_A", "k_B", "r_A", "r_B", "xor", "K")
    for variant in ("4.1", "4.2"):
        names = cols if variant == "4.1" else cols[1:]
        rows = [dict(zip(names, keyagree.table_row(r, variant)), probability=p)
                for r, p in keyagree.exhaustive_rounds(variant)]
        put(f"qka_table_{variant.replace('.', '')}", rows, "keyagree.exhaustive_rounds")
    put("qka_noise", [{"kind": k, "param": x, "fidelity": f}
                      for k in ("AD", "PD", "NMDPH", "NMDPO")
                      for x, f, _ in channels.fidelity_curve(k, step=0.05)],
        "channels.cqka_avg_fidelity")
    put("qka_detection", _qka_alpha_rows(), "keyagree.detection_closed_form, keyagree.attack_detection_oracle")
    put("qka_success", [{"n": n, "d": d, "Pr": keyagree.success_probability(n, d)}
                        for d in (0.0, 0.125, 0.25, 0.5) for n in range(1, 13)],
        "keyagree.success_probability")
    put("qka_dw_bound", _qka_bound_rows(), "keyagree.dw_summary")
    eq = {g: dl04game.find_equilibria(g, grid_n=args.grid) for g in dl04game.GAMES}
    put("dl04_equilibria", Table([r for g in dl04game.GAMES for r in _nash_rows(g, eq[g])], NASH_COLUMNS),
        "dl04game.find_equilibria")
    put("dl04_table_52", _table52_rows(), "dl04game.table_check")

    checks = acceptance.run_all(lambda k: rng_for(args.seed, 100 + k), args.rounds, args.grid, eq)
    manifest = {
        "seed": args.seed, "format": args.format, "rounds": args.rounds, "grid": args.grid,
        "files": [dict(f, sha256=_sha(out / f["file"])) for f in files],
        "acceptance": [c.to_dict() for c in checks],
        "all_passed": all(c.passed for c in checks),
    }
    (out / "manifest.json").write_text(json.dumps(_plain(manifest), sort_keys=True, indent=2) + "\n")
    for c in checks:
        print(c.line(), file=sys.stderr)
    return 0 if manifest["all_passed"] else 1


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output directory (default: stdout)")
    common.add_argument("--rounds", type=int, default=DEFAULT_ROUNDS)
    common.add_argument("--grid", type=int, default=100)
    common.add_argument("--alpha-deg", type=float, default=None)
    common.add_argument("--alpha-rad", type=float, default=None)
    common.add_argument("--tol", type=float, default=None)

    p = argparse.ArgumentParser(prog="artifact", description=__doc__.splitlines()[0])
    groups = p.add_subparsers(dest="group", required=True)

    def cmd(group, name, func, **kw):
        sp = group.add_parser(name, parents=[common], **kw)
        sp.set_defaults(func=func, name=name)
        return sp

    g = groups.add_parser("auth").add_subparsers(dest="cmd", required=True)
    s = cmd(g, "detect", cmd_auth_detect)
    s.add_argument("--n", type=int, default=None)
    s = cmd(g, "simulate", cmd_auth_simulate)
    s.add_argument("--protocol", choices=("2.1", "2.2", "2.3", "2.4"), default="2.3")
    s.add_argument("--adversary", choices=("none", "impersonate", "measure_resend"), default="none")
    s.add_argument("--n", type=int, default=6)
    s.add_argument("--sessions", type=int, default=1000)
    s = cmd(g, "attack", cmd_auth_attack)
    s.add_argument("--kind", choices=("impersonate", "measure-resend", "fake-state"), default="impersonate")
    s.add_argument("--protocol", choices=("2.1", "2.2", "2.3", "2.4"), default="2.3")
    s.add_argument("--n", type=int, default=6)

    g = groups.add_parser("qkd").add_subparsers(dest="cmd", required=True)
    curves = tuple(_CURVES) + ("dw-lower", "dw-upper")
    s = cmd(g, "rate", cmd_qkd_rate)
    s.add_argument("--curve", choices=curves, default="sb1")
    s.add_argument("--step", type=float, default=1e-3)
    s = cmd(g, "threshold", cmd_qkd_threshold)
    s.add_argument("--curve", choices=curves, default="sb1")
    s = cmd(g, "pns", cmd_qkd_pns)
    s.add_argument("--series", action="store_true", help="Eve's information against fibre length")
    cmd(g, "efficiency", cmd_qkd_efficiency)
    s = cmd(g, "simulate", cmd_qkd_simulate)
    s.add_argument("--protocol", choices=("3.1", "3.2"), default="3.2")

    g = groups.add_parser("qka").add_subparsers(dest="cmd", required=True)
    s = cmd(g, "simulate", cmd_qka_simulate)
    s.add_argument("--variant", choices=("4.1", "4.2"), default="4.1")
    s = cmd(g, "attack", cmd_qka_attack)
    s.add_argument("--n", type=int, default=6)
    s = cmd(g, "bound", cmd_qka_bound)
    s.add_argument("--mode", choices=("reproduction", "oracle"), default="reproduction")

    g = groups.add_parser("dl04").add_subparsers(dest="cmd", required=True)
    s = cmd(g, "dist", cmd_dl04_dist)
    s.add_argument("--attack", choices=("e1", "e2", "e3", "e4", "E1", "E2", "E3", "E4"), default="E1")
    s.add_argument("--p", type=float, default=0.5)
    s.add_argument("--q", type=float, default=0.5)
    s = cmd(g, "payoff", cmd_dl04_payoff)
    s.add_argument("--game", default="e1-e2")
    s.add_argument("--p", type=float, default=0.5)
    s.add_argument("--q", type=float, default=0.5)
    s.add_argument("--r", type=float, default=0.5)
    s = cmd(g, "nash", cmd_dl04_nash)
    s.add_argument("--game", default="e1-e2")
    cmd(g, "bound", cmd_dl04_bound)

    g = groups.add_parser("noise").add_subparsers(dest="cmd", required=True)
    s = cmd(g, "fidelity", cmd_noise_fidelity)
    s.add_argument("--kind", choices=("AD", "PD", "NMDPH", "NMDPO", "ad", "pd", "nmdph", "nmdpo"), default="PD")
    s.add_argument("--step", type=float, default=0.01)
    s.add_argument("--memory", type=float, default=None, help="memory parameter for NMDPH/NMDPO")
    s = cmd(g, "collective", cmd_noise_collective)
    s.add_argument("--kind", choices=("dephasing", "rotation"), default="dephasing")
    s.add_argument("--step", type=float, default=math.pi / 40)

    g = groups.add_parser("report").add_subparsers(dest="cmd", required=True)
    cmd(g, "all", report_all)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.rounds < 1 or args.grid < 1:
            raise ValueError("--rounds and --grid must be positive")
        if args.func is report_all:
            return report_all(args)
        emit(args.func(args), args, f"{args.group}_{args.name}")
        return 0
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, auth.ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
