"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 cap exhausted or inconclusive,
4 verification failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from . import engine, growth, pingpong, recurrence
from .engine import BasePointOutsideU, GeneratingSystem, PseudogroupSpec, ResourceCapExceeded
from .moebius import format_point
from .scenario import ScenarioError, load

log = logging.getLogger("homgrowth")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INCONCLUSIVE = 3
EXIT_FAILED = 4

OUT_ENV = "HOMGROWTH_OUT"


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_outputs(out_dir: Path, files: dict[str, str]) -> list[Path]:
    """Write every file to a temporary name first, then rename them all into place."""
    out_dir.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, content in files.items():
            fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.", suffix=".tmp")
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(content)
            staged.append((tmp, out_dir / name))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)
    return [final for _, final in staged]


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or "out")


def _scenario(args):
    if not args.scenario:
        raise CliError("--scenario is required", EXIT_INVALID)
    return load(args.scenario)


def _classify(series, params):
    try:
        return growth.classify_growth(series, params).to_json()
    except growth.TooFewPoints as e:
        return {"kind": growth.INCONCLUSIVE, "error": "too-few-points", "detail": str(e)}


def _members_json(ball) -> str:
    rows = [{"length": n, "matrix": g.to_str(), "point": format_point(p)}
            for g, (n, p) in ball.members.items()]
    return _dump(rows)


def _orbit_json(orbit) -> str:
    return _dump([{"distance": d, "point": format_point(p)} for p, d in orbit.items()])


def cmd_growth(args):
    sc = _scenario(args)
    if not 0 <= args.point_index < len(sc.base_points):
        raise CliError(f"point index {args.point_index} out of range", EXIT_INVALID)
    x = sc.base_points[args.point_index]
    R = args.max_radius if args.max_radius is not None else sc.caps.max_radius
    spec = sc.spec
    ball = engine.germ_ball(spec, x, R, max_nodes=sc.caps.max_nodes, threads=args.threads)
    orbit = engine.orbit_ball(spec, x, R, ball=ball)
    germ_series = growth.GrowthSeries.from_ball(ball)
    orbit_series = growth.GrowthSeries.from_orbit(orbit, R)
    germ_verdict = _classify(germ_series, sc.classifier)
    orbit_verdict = _classify(orbit_series, sc.classifier)
    tag = f"p{args.point_index}"
    if args.format == "json":
        tables = {f"germ_ball_{tag}.json": _members_json(ball),
                  f"orbit_ball_{tag}.json": _orbit_json(orbit),
                  f"germ_growth_{tag}.json": _dump([list(c) for c in germ_series.counts]),
                  f"orbit_growth_{tag}.json": _dump([list(c) for c in orbit_series.counts])}
    else:
        tables = {f"germ_ball_{tag}.csv": ball.to_csv(),
                  f"orbit_ball_{tag}.csv": engine.orbit_to_csv(orbit),
                  f"germ_growth_{tag}.csv": germ_series.to_csv(),
                  f"orbit_growth_{tag}.csv": orbit_series.to_csv()}
    meta = {"scenario": sc.name, "base_point": format_point(x), "radius": R,
            "metadata": sc.metadata}
    files = dict(tables)
    files[f"germ_spheres_{tag}.json"] = ball.sphere_sizes_json() + "\n"
    files[f"germ_verdict_{tag}.json"] = _dump({**meta, "object": "germ cover", **germ_verdict})
    files[f"orbit_verdict_{tag}.json"] = _dump({**meta, "object": "orbit", **orbit_verdict})
    write_outputs(_out_dir(args), files)
    print(_dump({"germ": germ_verdict["kind"], "orbit": orbit_verdict["kind"],
                 "germ_ball_size": len(ball), "orbit_ball_size": len(orbit)}), end="")
    return EXIT_OK


def cmd_recurrence(args):
    sc = _scenario(args)
    spec = sc.spec
    if spec.V is None:
        raise CliError("scenario has no V", EXIT_INVALID)
    Ncap = args.ncap if args.ncap is not None else sc.caps.Ncap
    files = {}
    summary = {"scenario": sc.name}
    code = EXIT_OK
    result = recurrence.find_recurrence_N(spec, Ncap)
    if result:
        N, cert = result
        files["recurrence_certificate.json"] = cert.dumps()
        summary["recurrence"] = {"status": "found", "N": N, "pieces": len(cert.pieces)}
    else:
        summary["recurrence"] = {"status": "NOT-FOUND", "reason": result.reason}
        code = EXIT_INCONCLUSIVE
    if args.claim_b_exclude is not None:
        F = engine.cayley_ball(spec.S, args.claim_b_exclude)
        cb = recurrence.check_claim_B(spec, F, sc.caps.depth_cap, closure=args.closure)
        if cb:
            files["claim_b_certificate.json"] = cb.dumps()
            summary["claim_b"] = {"status": "covered", "depth": cb.N, "excluded": len(F)}
        else:
            summary["claim_b"] = {"status": "INCONCLUSIVE", "reason": cb.reason}
            code = EXIT_INCONCLUSIVE
    if files:
        write_outputs(_out_dir(args), files)
    print(_dump(summary), end="")
    return code


def _pingpong_cert_from_scenario(sc):
    node = sc.section("pingpong")
    if node is None or node.get("elements") is None or node.get("tables") is None:
        raise CliError("scenario has no pingpong elements/tables", EXIT_INVALID)
    elements = tuple(sc.element_ref(n) for n in node.get("elements").seq())
    tables = tuple(n.arcset() for n in node.get("tables").seq())
    return pingpong.PingPongCertificate(elements, tables)


def cmd_pingpong(args):
    if args.action == "verify":
        if args.certificate:
            cert = pingpong.PingPongCertificate.from_json(_read_json(args.certificate))
        else:
            cert = _pingpong_cert_from_scenario(_scenario(args))
        try:
            verdict = pingpong.verify_certificate(cert)
        except ValueError as e:
            raise CliError(str(e), EXIT_INVALID)
        print(_dump(verdict.to_json()), end="")
        return EXIT_OK if verdict else EXIT_FAILED
    sc = _scenario(args)
    node = sc.section("pingpong")
    if node is None or node.get("elements") is None:
        raise CliError("scenario has no pingpong elements", EXIT_INVALID)
    elements = [sc.element_ref(n) for n in node.get("elements").seq()]
    try:
        cert = pingpong.search_certificate(elements, args.resolution)
    except ValueError as e:
        raise CliError(str(e), EXIT_INVALID)
    if cert is None:
        print(_dump({"status": "NOT-FOUND"}), end="")
        return EXIT_INCONCLUSIVE
    write_outputs(_out_dir(args), {"pingpong_certificate.json": cert.dumps()})
    print(_dump({"status": "found", **cert.to_json()}), end="")
    return EXIT_OK


def cmd_coverage(args):
    sc = _scenario(args)
    node = sc.section("coverage")
    if node is None or node.get("elements") is None:
        raise CliError("scenario has no coverage section", EXIT_INVALID)
    elements = [sc.element_ref(n) for n in node.get("elements").seq()]
    V = node.get("V").arcset() if node.get("V") is not None else sc.V
    target = node.get("target").arcset() if node.get("target") is not None else sc.U
    if V is None:
        raise CliError("coverage needs V", EXIT_INVALID)
    result = recurrence.check_pair_coverage(elements, V, target)
    report = result.to_json()
    write_outputs(_out_dir(args), {"pair_coverage.json": _dump(report)})
    print(_dump(report), end="")
    return EXIT_OK if result else EXIT_FAILED


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}", EXIT_INVALID)
    except json.JSONDecodeError as e:
        raise CliError(f"{path}:{e.lineno}:{e.colno}: {e.msg}", EXIT_INVALID)


def _read_series(path):
    try:
        return growth.GrowthSeries.from_csv(Path(path).read_text())
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}", EXIT_INVALID)


def _net(sc_node, orbit, name):
    if sc_node is None or (sc_node.is_scalar and sc_node.scalar() == "all"):
        return set(orbit)
    if sc_node.is_scalar and sc_node.scalar() in ("even", "odd"):
        parity = 0 if sc_node.scalar() == "even" else 1
        return {p for p, d in orbit.items() if d % 2 == parity}
    if sc_node.is_seq:
        return {n.point() for n in sc_node.seq()}
    sc_node.fail(f"{name} must be 'all', 'even', 'odd' or a list of points")


def cmd_compare(args):
    if args.kind == "domination":
        if not args.u or not args.v:
            raise CliError("domination needs --u and --v series files", EXIT_INVALID)
        u, v = _read_series(args.u), _read_series(args.v)
        if args.constants:
            ok = growth.check_domination(u, v, *args.constants)
            report = {"constants": [str(c) for c in args.constants], "dominated": ok}
        else:
            found = growth.search_domination(u, v)
            ok = found is not None
            report = {"constants": list(found) if found else None, "dominated": ok}
        write_outputs(_out_dir(args), {"domination.json": _dump(report)})
        print(_dump(report), end="")
        return EXIT_OK if ok else EXIT_INCONCLUSIVE

    sc = _scenario(args)
    R = args.max_radius if args.max_radius is not None else sc.caps.max_radius
    section = sc.section("compare")
    x = sc.base_points[args.point_index]
    if args.kind == "quasi-lattices":
        node = section.get("quasi_lattice") if section is not None else None
        C = node.get("C").integer(positive=False) if node is not None and node.get("C") else 1
        orbit = engine.orbit_ball(sc.spec, x, R, max_nodes=sc.caps.max_nodes)
        net1 = _net(node.get("net1") if node is not None else None, orbit, "net1")
        net2 = _net(node.get("net2") if node is not None else None, orbit, "net2")
        dist = growth.orbit_metric(sc.spec, R, max_nodes=sc.caps.max_nodes)
        try:
            rep = growth.compare_quasi_lattices(orbit, net1, net2, C, dist)
        except growth.NotACNet as e:
            raise CliError(f"not-a-C-net: {e}", EXIT_FAILED)
        report = rep.to_json()
        ok = rep.verified
    else:
        node = section.get("generating_systems") if section is not None else None
        if node is None or node.get("other") is None:
            raise CliError("scenario has no compare.generating_systems.other", EXIT_INVALID)
        other = [(k.scalar(), v.element()) for k, v in node.get("other").items()]
        specB = PseudogroupSpec(GeneratingSystem(other), sc.U, sc.V)
        d = growth.compare_generating_systems(sc.spec, specB, x, R, max_nodes=sc.caps.max_nodes)
        report = d.to_json()
        ok = True
    report = {"scenario": sc.name, "kind": args.kind, **report}
    write_outputs(_out_dir(args), {f"compare_{args.kind}.json": _dump(report)})
    print(_dump(report), end="")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_reverify(args):
    data = _read_json(args.certificate)
    kind = data.get("kind") if isinstance(data, dict) else None
    try:
        if kind == "pingpong":
            ok = bool(pingpong.verify_certificate(pingpong.PingPongCertificate.from_json(data)))
        elif kind in ("recurrence", "claim-B"):
            ok = recurrence.verify_certificate(recurrence.CoverageCertificate.from_json(data))
        else:
            raise CliError(f"unknown certificate kind {kind!r}", EXIT_INVALID)
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(f"malformed certificate: {e}", EXIT_INVALID)
    print("true" if ok else "false")
    return EXIT_OK if ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario YAML file")
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./out)")
    common.add_argument("--max-radius", type=int, default=None)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--point-index", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="homgrowth", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("growth", parents=[common], help="germ-cover and orbit growth")
    g.set_defaults(func=cmd_growth)

    r = sub.add_parser("recurrence", parents=[common], help="recurrence certificate")
    r.add_argument("--ncap", type=int, default=None)
    r.add_argument("--claim-b-exclude", type=int, default=None, metavar="K",
                   help="also cover U by translates of V avoiding the radius-K Cayley ball")
    r.add_argument("--closure", action="store_true", help="cover the closure of U")
    r.set_defaults(func=cmd_recurrence)

    pp = sub.add_parser("pingpong", parents=[common], help="verify or search ping-pong tables")
    pp.add_argument("action", choices=("verify", "search"))
    pp.add_argument("--certificate", help="certificate JSON (verify)")
    pp.add_argument("--resolution", type=_fraction, default="1/16")
    pp.set_defaults(func=cmd_pingpong)

    c = sub.add_parser("coverage", parents=[common], help="pair coverage of the closure of U")
    c.set_defaults(func=cmd_coverage)

    cmp_ = sub.add_parser("compare", parents=[common], help="domination / quasi-lattices / "
                          "generating systems")
    cmp_.add_argument("kind", choices=("domination", "quasi-lattices", "generating-systems"))
    cmp_.add_argument("--u", help="growth series CSV (dominated side)")
    cmp_.add_argument("--v", help="growth series CSV (dominating side)")
    cmp_.add_argument("--constants", nargs=4, type=_fraction, metavar=("A", "B", "C", "D"))
    cmp_.set_defaults(func=cmd_compare)

    rv = sub.add_parser("reverify", help="re-check a certificate file with arc algebra")
    rv.add_argument("certificate")
    rv.add_argument("-v", "--verbose", action="store_true")
    rv.set_defaults(func=cmd_reverify)
    return p


def _fraction(text):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")
    return value


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (ScenarioError, BasePointOutsideU) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceCapExceeded as e:
        print(f"error: cap exceeded: {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
