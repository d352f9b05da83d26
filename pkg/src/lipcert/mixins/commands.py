# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any

from lipcert.errors import ValidationError
from lipcert.estimator import (
    EstimatorParams,
    LipschitzCertificate,
    RadialProfile,
    VerdictKind,
    ball_lipschitz_constant,
    certificate_sequence,
    classify_global_lipschitz,
    decade_schedule,
    radial_growth_profile,
    subgradient_lower_bound,
    tune_parameters,
)
from lipcert.geometry import build_cover, cover_containment_check
from lipcert.verification import RELATIVE_TOLERANCE, certificate_soundness_suite, convexity_check, corollary_constancy_check
from lipcert.zoo import MODULUS_FORMULAS, FunctionSpec, catalog

if TYPE_CHECKING:
    from lipcert.interface import LipCertProtocol as LipCert

EXIT_OK = 0
EXIT_VIOLATION = 3


class CommandsMixin:
    def run(self: LipCert) -> int:
        match self.command:
            case "ball":
                return self.cmd_ball()
            case "tune":
                return self.cmd_tune()
            case "modulus":
                return self.cmd_modulus()
            case "classify":
                return self.cmd_classify()
            case "verify":
                return self.cmd_verify()
            case "certseq":
                return self.cmd_certseq()
            case "zoo":
                return self.cmd_zoo()
            case "cover":
                return self.cmd_cover()
            case "convexity":
                return self.cmd_convexity()
            case "constancy":
                return self.cmd_constancy()
            case "subgrad":
                return self.cmd_subgrad()
            case _:
                raise ValidationError(f"unknown command {self.command!r}", "command")

    # Certificates --------------------------------------------------------------------------------

    def cmd_ball(self: LipCert) -> int:
        spec = self.load_function()
        ball = self.parse_ball(self.args.center, self.args.radius)
        params = EstimatorParams(self.args.lam, self.args.alpha)
        cover = self.option("cover", "estimator", "cover")
        slack = float(self.option("slack", "estimator", "shell_slack"))
        if not spec.convex:
            self.logger.warning(f"{spec.function_id} is not convex: its certificate is a formal number, not a Lipschitz constant")

        cert = ball_lipschitz_constant(spec, ball, params, cover, slack, self.config["geometry"]["shell_max_grid_points"], self.executor, self.chunk_size)
        inputs = {"function": spec.to_document(), "ball": ball.to_dict(), "params": params.to_dict(), "cover": cover, "slack": slack}
        self.emit(self.build_report(inputs, {"certificate": cert.to_dict()}))
        self.logger.info(f"{spec.function_id} on B({ball.center.tolist()}, {ball.radius}): L={cert.L!r} from {cert.eval_count} evaluations")
        return EXIT_OK

    def cmd_tune(self: LipCert) -> int:
        spec = self.load_function()
        ball = self.parse_ball(self.args.center, self.args.radius)
        alpha_grid = self.parse_floats(self.option("alpha_grid", "estimator", "alpha_grid"), "alpha_grid")
        delta = float(self.option("delta", "estimator", "delta"))
        cover = self.option("cover", "estimator", "cover")
        slack = float(self.option("slack", "estimator", "shell_slack"))

        result = tune_parameters(
            spec, ball, alpha_grid, delta, cover, slack, self.config["geometry"]["shell_max_grid_points"], self.executor, self.chunk_size
        )
        inputs = {"function": spec.to_document(), "ball": ball.to_dict(), "alpha_grid": alpha_grid, "delta": delta, "cover": cover, "slack": slack}
        self.emit(self.build_report(inputs, {"certificate": result.best.to_dict(), "tuning": result.to_dict()}))
        self.logger.info(f"{spec.function_id}: best alpha {result.best.params.alpha} gives L={result.best.L!r}")
        return EXIT_OK

    def cmd_certseq(self: LipCert) -> int:
        spec = self.load_function()
        center = self.parse_vector(self.args.center, "center")
        radii = self.parse_floats(self.args.radii, "radii")
        delta = float(self.option("delta", "estimator", "delta"))
        slack = float(self.option("slack", "estimator", "shell_slack"))
        reference = self.args.modulus
        if reference is None:
            analytic = spec.analytic_info().global_modulus
            reference = analytic if analytic is not None and math.isfinite(analytic) else None

        sequence = certificate_sequence(
            spec, center, self.args.alpha, delta, radii, reference, slack, self.config["geometry"]["shell_max_grid_points"], self.executor, self.chunk_size
        )
        inputs = {"function": spec.to_document(), "center": center, "alpha": self.args.alpha, "delta": delta, "radii": radii, "slack": slack}
        self.emit(self.build_report(inputs, {"sequence": sequence.to_dict()}), (("r", "L", "reference_bound"), sequence.rows()))
        self.logger.info(f"{spec.function_id}: {len(radii)} shell certificates, last L={sequence.values[-1]!r}, reference bound {sequence.reference_bound!r}")
        return EXIT_OK

    # Global modulus ------------------------------------------------------------------------------

    def cmd_modulus(self: LipCert) -> int:
        spec = self.load_function()
        dim = self.function_dim(spec)
        radii = decade_schedule(
            float(self.option("rmin", "profile", "rmin")),
            float(self.option("rmax", "profile", "rmax")),
            int(self.option("points_per_decade", "profile", "points_per_decade")),
        )
        directions = int(self.option("dirs", "profile", "directions"))
        growth = float(self.option("growth_factor", "profile", "growth_factor_threshold"))
        tolerance = float(self.option("plateau_tol", "profile", "plateau_rel_tol"))
        seed = self.sample_seed()
        info = spec.analytic_info()
        hints = [h for h in info.direction_hints if h.size == dim]

        profile = radial_growth_profile(spec, dim, radii, directions, hints, seed, self.executor, self.chunk_size)
        verdict = classify_global_lipschitz(profile, growth, tolerance)

        outputs: dict[str, Any] = {
            "profile": profile.to_dict(),
            "verdict": verdict.to_dict(),
            "analytic_modulus": info.global_modulus,
            "relative_error": None,
            "signed_tail_gap": None,
            "notes": self.modulus_notes(spec, verdict.kind, verdict.modulus_estimate, tolerance),
        }
        estimate, analytic = verdict.modulus_estimate, info.global_modulus
        if estimate is not None and analytic is not None and math.isfinite(analytic):
            outputs["relative_error"] = abs(estimate - analytic) / analytic if analytic > 0 else abs(estimate)
        if profile.ratios[-1] > 0:
            outputs["signed_tail_gap"] = abs(profile.ratios[-1] - profile.signed_ratios[-1]) / profile.ratios[-1]

        inputs = {
            "function": spec.to_document(),
            "dim": dim,
            "radii": radii,
            "directions": directions,
            "seed": seed,
            "growth_factor_threshold": growth,
            "plateau_rel_tol": tolerance,
        }
        self.emit(self.build_report(inputs, outputs), (("radius", "ratio", "signed_ratio"), profile.rows()))
        self.logger.info(f"{spec.function_id}: {verdict.kind} (estimate {estimate!r}, analytic {analytic!r})")
        return EXIT_OK

    def modulus_notes(self: LipCert, spec: FunctionSpec, kind: VerdictKind, estimate: float | None, tolerance: float) -> list[str]:
        notes = []
        if kind == VerdictKind.GLOBALLY_LIPSCHITZ and estimate is not None and estimate <= tolerance:
            notes.append("limsup |f(x)|/||x|| is zero up to sampling; for convex f this holds exactly when f is bounded above, that is constant")
        if kind == VerdictKind.DIVERGING:
            notes.append("the ball moduli grow without bound, so f is not globally Lipschitz whether or not it is convex")
        if not spec.convex:
            notes.append(f"{spec.function_id} is not convex: the growth ratio need not equal its global Lipschitz modulus")
        return notes

    def cmd_classify(self: LipCert) -> int:
        data = self.read_json_file(self.args.profile, "profile")
        profile = RadialProfile.from_dict(self.unwrap(data, "profile", ("modulus",)))
        growth = float(self.option("growth_factor", "profile", "growth_factor_threshold"))
        tolerance = float(self.option("plateau_tol", "profile", "plateau_rel_tol"))

        verdict = classify_global_lipschitz(profile, growth, tolerance)
        inputs = {"profile": profile.to_dict(), "growth_factor_threshold": growth, "plateau_rel_tol": tolerance}
        self.emit(self.build_report(inputs, {"verdict": verdict.to_dict()}))
        self.logger.info(f"profile from {self.args.profile}: {verdict.kind}")
        return EXIT_OK

    # Verification --------------------------------------------------------------------------------

    def cmd_verify(self: LipCert) -> int:
        spec = self.load_function()
        data = self.read_json_file(self.args.cert, "certificate")
        cert = LipschitzCertificate.from_dict(self.unwrap(data, "certificate", ("ball", "tune")))
        if cert.function_id != spec.function_id:
            self.logger.warning(f"certificate was issued for {cert.function_id}, checking it against {spec.function_id}")
        pairs = int(self.option("pairs", "verification", "pairs"))
        seed = self.sample_seed()

        report = certificate_soundness_suite(spec, cert, pairs, seed, self.executor, self.chunk_size)
        inputs = {"function": spec.to_document(), "certificate": cert.to_dict(), "pairs": pairs, "seed": seed}
        self.emit(self.build_report(inputs, {"soundness": report.to_dict()}))
        if not report.passed:
            x, y = report.ratio.witness_pair
            self.logger.warning(f"soundness violation: ratio {report.ratio.max_ratio!r} > L={cert.L!r} at x={x.tolist()}, y={y.tolist()}")
            return EXIT_VIOLATION
        self.logger.info(f"certificate L={cert.L!r} survived {pairs} pairs (max ratio {report.ratio.max_ratio!r})")
        return EXIT_OK

    def cmd_cover(self: LipCert) -> int:
        ball = self.parse_ball(self.args.center, self.args.radius)
        kind = self.option("kind", "estimator", "cover")
        slack = float(self.option("slack", "estimator", "shell_slack"))
        directions = int(self.option("directions", "verification", "containment_directions"))
        seed = self.sample_seed()

        cover = build_cover(kind, ball, slack, self.config["geometry"]["shell_max_grid_points"])
        report = cover_containment_check(cover, directions, seed, self.executor, self.chunk_size)
        inputs = {"kind": kind, "ball": ball.to_dict(), "slack": slack, "directions": directions, "seed": seed}
        self.emit(self.build_report(inputs, {"cover": cover.to_dict(include_points=bool(self.args.points)), "containment": report.to_dict()}))
        if not report.contained:
            self.logger.warning(f"{kind} cover misses the ball by {-report.margin!r} along {report.worst_direction.tolist()}")
            return EXIT_VIOLATION
        self.logger.info(f"{kind} cover of {cover.size} points contains the ball, margin {report.margin!r}")
        return EXIT_OK

    def cmd_convexity(self: LipCert) -> int:
        spec = self.load_function()
        region = self.parse_ball(self.args.center, self.args.radius)
        triples = int(self.option("triples", "verification", "triples"))
        seed = self.sample_seed()

        report = convexity_check(spec, region, triples, seed, self.executor, self.chunk_size)
        inputs = {"function": spec.to_document(), "region": region.to_dict(), "triples": triples, "seed": seed}
        self.emit(self.build_report(inputs, {"convexity": report.to_dict()}))
        if not report.ok:
            return EXIT_VIOLATION
        self.logger.info(f"{spec.function_id}: no convexity violation in {triples} triples")
        return EXIT_OK

    def cmd_constancy(self: LipCert) -> int:
        spec = self.load_function()
        dim = self.function_dim(spec)
        radii = decade_schedule(
            float(self.option("rmin", "profile", "rmin")),
            float(self.option("rmax", "profile", "rmax")),
            int(self.option("points_per_decade", "profile", "points_per_decade")),
        )
        directions = int(self.option("dirs", "profile", "directions"))
        seed = self.sample_seed()

        report = corollary_constancy_check(spec, dim, radii, directions, seed, self.executor, self.chunk_size)
        inputs = {"function": spec.to_document(), "dim": dim, "radii": radii, "directions": directions, "seed": seed}
        self.emit(self.build_report(inputs, {"constancy": report.to_dict()}))
        self.logger.info(f"{spec.function_id}: {report.summary}")
        return EXIT_OK

    def cmd_subgrad(self: LipCert) -> int:
        spec = self.load_function()
        ball = self.parse_ball(self.args.center, self.args.radius)
        samples = int(self.args.samples)
        if samples < 1:
            raise ValidationError(f"must be positive, got {samples}", "--samples")
        seed = self.sample_seed()
        alpha_grid = self.parse_floats(self.option("alpha_grid", "estimator", "alpha_grid"), "alpha_grid")
        delta = float(self.option("delta", "estimator", "delta"))
        cover = self.option("cover", "estimator", "cover")
        slack = float(self.option("slack", "estimator", "shell_slack"))

        points = self.random_points_in(ball, samples, seed)
        bound = subgradient_lower_bound(spec, points)
        tuned = tune_parameters(
            spec, ball, alpha_grid, delta, cover, slack, self.config["geometry"]["shell_max_grid_points"], self.executor, self.chunk_size
        )
        holds = bound.value <= tuned.best.L * (1.0 + RELATIVE_TOLERANCE)

        inputs = {"function": spec.to_document(), "ball": ball.to_dict(), "samples": samples, "seed": seed, "alpha_grid": alpha_grid, "delta": delta, "cover": cover, "slack": slack}
        outputs = {"subgradient": bound.to_dict(), "certificate": tuned.best.to_dict(), "sandwich_holds": holds}
        self.emit(self.build_report(inputs, outputs))
        if spec.convex and not holds:
            self.logger.warning(f"gradient norm {bound.value!r} exceeds certificate L={tuned.best.L!r}")
            return EXIT_VIOLATION
        self.logger.info(f"{spec.function_id}: {bound.value!r} <= modulus on ball <= {tuned.best.L!r}")
        return EXIT_OK

    # Catalog -------------------------------------------------------------------------------------

    def cmd_zoo(self: LipCert) -> int:
        write_dir = Path(self.args.write_dir) if getattr(self.args, "write_dir", None) else None
        if write_dir is not None:
            write_dir.mkdir(parents=True, exist_ok=True)

        entries = []
        for spec in catalog():
            entries.append(
                {
                    "id": spec.function_id,
                    "kind": str(spec.kind),
                    "spec": spec.to_document(),
                    "convex": spec.convex,
                    "global_modulus": spec.analytic_info().global_modulus,
                    "formula": MODULUS_FORMULAS[spec.kind],
                }
            )
            if write_dir is not None:
                target = write_dir / f"{spec.function_id}.json"
                target.write_text(json.dumps(spec.to_document(), indent=2) + "\n", encoding="utf-8")
                self.logger.debug(f"wrote {target}")

        self.emit(self.build_report({"write_dir": str(write_dir) if write_dir else None}, {"functions": entries}))
        self.logger.info(f"listed {len(entries)} function kinds")
        return EXIT_OK
