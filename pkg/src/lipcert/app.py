# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
import argparse
import logging
import sys
from json_logging import setup_logging, get_logger
from .core import LipCert
from .errors import LipcertError, ValidationError


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-c",
        "--config",
        default=None,
        help="Directory or file path for config.yaml (defaults to $LIPCERT_CONFIG, then built-in defaults)",
    )
    common.add_argument("--debug", action="store_true", default=None, help="Log per-cover and per-radius numerics")
    common.add_argument("--out", help="Write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json", help="csv is available for modulus and certseq")
    common.add_argument("--seed", type=int, help="Seed for every sampled direction and point")
    common.add_argument("--workers", type=int, help="Evaluation threads (1 runs serially)")

    fn = argparse.ArgumentParser(add_help=False)
    fn.add_argument("--fn", required=True, help="Function spec JSON file")

    ball = argparse.ArgumentParser(add_help=False)
    ball.add_argument("--center", required=True, help="Comma separated coordinates, e.g. 0,0")
    ball.add_argument("--radius", type=float, required=True)

    cover = argparse.ArgumentParser(add_help=False)
    cover.add_argument("--cover", choices=["cross", "simplex", "shell"])
    cover.add_argument("--slack", type=float, help="Shell thickness added to the covered radius")

    profile = argparse.ArgumentParser(add_help=False)
    profile.add_argument("--dim", type=int, help="Dimension for functions that work in any dimension")
    profile.add_argument("--rmin", type=float)
    profile.add_argument("--rmax", type=float)
    profile.add_argument("--points-per-decade", dest="points_per_decade", type=int)
    profile.add_argument("--dirs", type=int, help="Random directions on top of +-e_i and the analytic hints")

    thresholds = argparse.ArgumentParser(add_help=False)
    thresholds.add_argument("--growth-factor", dest="growth_factor", type=float)
    thresholds.add_argument("--plateau-tol", dest="plateau_tol", type=float)

    p = argparse.ArgumentParser(prog="lipcert", exit_on_error=True, description="Certified Lipschitz constants of convex functions")
    sub = p.add_subparsers(dest="command", required=True)

    cmd = sub.add_parser("ball", parents=[common, fn, ball, cover], help="Certificate on one ball for given alpha and lambda")
    cmd.add_argument("--alpha", type=float, required=True)
    cmd.add_argument("--lambda", dest="lam", type=float, required=True)

    cmd = sub.add_parser("tune", parents=[common, fn, ball, cover], help="Smallest certificate over an alpha grid")
    cmd.add_argument("--alpha-grid", dest="alpha_grid", help="Comma separated alphas, each > 1")
    cmd.add_argument("--delta", type=float, help="lambda = (1 - delta) * alpha / (alpha + 1)")

    sub.add_parser("modulus", parents=[common, fn, profile, thresholds], help="Radial growth profile and global Lipschitz verdict")

    cmd = sub.add_parser("classify", parents=[common, thresholds], help="Verdict for a stored profile or modulus report")
    cmd.add_argument("--profile", required=True)

    cmd = sub.add_parser("verify", parents=[common, fn], help="Try to beat a stored certificate with sampled pairs")
    cmd.add_argument("--cert", required=True, help="Certificate JSON or a ball/tune report")
    cmd.add_argument("--pairs", type=int)

    cmd = sub.add_parser("certseq", parents=[common, fn], help="Shell certificates on growing balls")
    cmd.add_argument("--center", required=True)
    cmd.add_argument("--alpha", type=float, default=10.0)
    cmd.add_argument("--delta", type=float)
    cmd.add_argument("--radii", default="10,100,1000,10000")
    cmd.add_argument("--slack", type=float)
    cmd.add_argument("--modulus", type=float, help="Reference global modulus (defaults to the analytic one)")

    cmd = sub.add_parser("zoo", parents=[common], help="List the function kinds with their analytic moduli")
    cmd.add_argument("--write-dir", dest="write_dir", help="Also write each example spec as <id>.json here")

    cmd = sub.add_parser("cover", parents=[common, ball], help="Build a cover and check it contains the ball")
    cmd.add_argument("--kind", choices=["cross", "simplex", "shell"])
    cmd.add_argument("--slack", type=float)
    cmd.add_argument("--directions", type=int)
    cmd.add_argument("--points", action="store_true", help="Include the cover points in the report")

    cmd = sub.add_parser("convexity", parents=[common, fn, ball], help="Look for violations of the convexity inequality")
    cmd.add_argument("--triples", type=int)

    sub.add_parser("constancy", parents=[common, fn, profile], help="Is f bounded above, constant, or neither")

    cmd = sub.add_parser("subgrad", parents=[common, fn, ball, cover], help="Gradient norm lower bound against the tuned certificate")
    cmd.add_argument("--samples", type=int, default=1000)

    return p


def _logs_to_stderr() -> None:
    # reports own stdout
    for handler in logging.getLogger().handlers:
        if isinstance(handler, logging.StreamHandler) and getattr(handler, "stream", None) is sys.stdout:
            handler.setStream(sys.stderr)


def main(argv: list[str] | None = None) -> int:
    setup_logging()
    _logs_to_stderr()
    logger = get_logger(__name__)

    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        with LipCert(args=args) as lipcert:
            return lipcert.run()
    except ValidationError as err:
        logger.error(f"invalid input: {err}")
        return err.exit_code
    except LipcertError as err:
        logger.error(f"{args.command} failed: {err!r}")
        return err.exit_code
    except KeyboardInterrupt:
        logger.warning("interrupted (Ctrl+C)")
        return 1
    except Exception as err:
        logger.error(f"unhandled exception: {err!r}", exc_info=True)
        return 1
    finally:
        logger.info(f"lipcert {args.command} stopped.")
