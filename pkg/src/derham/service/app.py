"""FastAPI service wrapping the exterior-calculus toolkit.

Every operation of the toolkit is exposed as a POST endpoint with typed
request/response models; the CLI is a thin client of this service (either
over HTTP or through an in-process test client).
"""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..bumps import make_tensor_bump
from ..exterior import all_blades
from ..forms import exterior_d, q_complex_3d
from ..poincare import (ClosednessError, PoincareContext,
                        check_qspace_preservation, homotopy_defect_R,
                        poincare_R)
from ..reports import environment_fingerprint, report_to_dict
from ..suites import (SUITES, default_bump, random_poly_bump_form,
                      random_poly_form, run_suite)
from . import models as m


def _default_bump_spec(n: int, k: int = 1) -> m.BumpSpec:
    return m.BumpSpec(kind="tensor", n=n, center=[0] * n, r=1, k=k)


def create_app() -> FastAPI:
    app = FastAPI(
        title="derham verification service",
        description="Regularized Poincare and Bogovskii operators on "
                    "differential forms, with exact and numeric verification.",
        version=__version__,
    )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/config/schema")
    def config_schema() -> dict:
        return m.RunConfig.model_json_schema()

    # -- poincare ----------------------------------------------------------

    @app.post("/poincare/apply", response_model=m.PoincareApplyResponse)
    def poincare_apply(req: m.PoincareApplyRequest):
        u = req.form.build()
        bump = (req.bump or _default_bump_spec(u.n)).build()
        try:
            ctx = PoincareContext(bump)
            out = poincare_R(ctx, u)
        except (ValueError, RuntimeError) as err:
            raise HTTPException(status_code=422, detail=str(err))
        return m.PoincareApplyResponse(
            form=m.PolyFormModel.from_form(out),
            degree_in=u.degree, degree_out=out.degree,
            max_total_degree=out.max_total_degree())

    @app.post("/poincare/homotopy-check", response_model=m.PoincareHomotopyResponse)
    def poincare_homotopy(req: m.PoincareHomotopyRequest):
        bump = (req.bump or _default_bump_spec(req.n)).build()
        ctx = PoincareContext(bump)
        rng = random.Random(req.seed)
        l_values = req.l_values or list(range(0, req.n + 1))
        cells = []
        for l in l_values:
            if not 0 <= l <= req.n:
                raise HTTPException(status_code=422, detail=f"l={l} outside 0..n")
            bad = 0
            for _ in range(req.count):
                u = random_poly_form(rng, req.n, l, req.degree)
                if not homotopy_defect_R(ctx, u).is_zero():
                    bad += 1
            cells.append(m.HomotopyCellResult(n=req.n, l=l, forms=req.count,
                                              violations=bad))
        return m.PoincareHomotopyResponse(
            all_zero=all(c.violations == 0 for c in cells), cells=cells)

    @app.post("/poincare/qspace-check", response_model=m.QspaceCheckResponse)
    def poincare_qspace(req: m.QspaceCheckRequest):
        bump = (req.bump or _default_bump_spec(3)).build()
        ctx = PoincareContext(bump)
        specs = q_complex_3d(req.p)
        per = {}
        ok = True
        for l in req.l_values or [1, 2, 3]:
            if not 1 <= l <= 3:
                raise HTTPException(status_code=422, detail=f"l={l} outside 1..3")
            out = check_qspace_preservation(ctx, specs, l)
            ok = ok and out["all_preserved"]
            per[str(l)] = {"count": out["count"],
                           "all_preserved": out["all_preserved"]}
        return m.QspaceCheckResponse(p=req.p, all_preserved=ok, per_degree=per)

    # -- bogovskii ----------------------------------------------------------

    @app.post("/bogovskii/eval", response_model=m.BogovskiiEvalResponse)
    def bogovskii_eval(req: m.BogovskiiEvalRequest):
        from ..bogovskii import bogovskii_T, poincare_R_numeric
        u = req.fixture.build()
        bump = (req.bump or m.BumpSpec(n=u.n, center=[0] * u.n, r="1/2", k=4)).build()
        ctx = req.quadrature.build(bump)
        op = bogovskii_T if req.operator == "T" else poincare_R_numeric
        try:
            values = [op(ctx, u, np.asarray(x, dtype=float)).tolist()
                      for x in req.points]
        except ValueError as err:
            raise HTTPException(status_code=422, detail=str(err))
        return m.BogovskiiEvalResponse(
            blades=[list(b) for b in all_blades(u.n, u.degree - 1)],
            values=values)

    @app.post("/bogovskii/homotopy-check", response_model=m.ResidualReport)
    def bogovskii_homotopy(req: m.BogovskiiHomotopyRequest):
        from ..bogovskii import BogovskiiContext, homotopy_residual_T
        from ..sampled import zero_mean_volume_form
        n = req.n
        bump = (req.bump or m.BumpSpec(n=n, center=[0] * n, r="1/2", k=4)).build()
        ctx = req.quadrature.build(bump)
        rng = np.random.default_rng(req.seed)
        pts = rng.uniform(-0.4, 0.4, size=(req.points, n))
        cases = []
        worst = 0.0
        means = []
        for l in ([req.l] if req.l is not None else range(0, n + 1)):
            if l == n:
                u = zero_mean_volume_form(n, [0.3] + [0.2] * (n - 1),
                                          [-0.25] + [-0.15] * (n - 1), 0.45)
            else:
                u = random_poly_bump_form(n, l, rng, center=[0.1] * n, radius=0.7)
            out = homotopy_residual_T(ctx, u, pts)
            worst = max(worst, out["max_residual"])
            means.append(out["mean_residual"])
            cases.append({"l": l, "max_residual": out["max_residual"],
                          "mean_residual": out["mean_residual"],
                          "fd_step": out["fd_step"]})
        return m.ResidualReport(max_residual=worst,
                                mean_residual=float(np.mean(means)),
                                tolerance=5e-4, passed=worst <= 5e-4,
                                cases=cases)

    @app.post("/bogovskii/adjoint-check", response_model=m.AdjointCheckResponse)
    def bogovskii_adjoint(req: m.AdjointCheckRequest):
        from ..bogovskii import adjoint_pairings
        bump = (req.bump or m.BumpSpec(n=2, center=[0, 0], r="1/2", k=4)).build()
        ctx = req.quadrature.build(bump)
        rng = np.random.default_rng(req.seed)
        rows = []
        worst = 0.0
        for i in range(req.pairs):
            l = req.l if req.l is not None else int(rng.integers(0, 2))
            u = random_poly_bump_form(2, l, rng, center=rng.uniform(-0.15, 0.15, 2),
                                      radius=0.6)
            v = random_poly_bump_form(2, l + 1, rng,
                                      center=rng.uniform(-0.15, 0.15, 2),
                                      radius=0.6)
            lhs, rhs = adjoint_pairings(ctx, u, v)
            rel = abs(lhs - rhs) / max(abs(lhs), 1e-30)
            worst = max(worst, rel)
            rows.append({"pair": i, "l": l, "lhs": lhs, "rhs": rhs,
                         "relative_defect": rel})
        return m.AdjointCheckResponse(max_relative_defect=worst, tolerance=1e-5,
                                      passed=worst <= 1e-5, pairs=rows)

    @app.post("/kernel/g-scan", response_model=m.KernelScanResponse)
    def kernel_scan(req: m.KernelScanRequest):
        from ..bogovskii import kernel_G, kernel_G_homogeneous, weak_singularity_scan
        n = req.n
        bump = (req.bump or m.BumpSpec(n=n, center=[0] * n, r="1/2", k=4)).build()
        rng = np.random.default_rng(req.seed)
        rows = []
        worst = 0.0
        used = 0
        while used < req.pairs:
            x = rng.uniform(-0.45, 0.45, n)
            y = rng.uniform(-2, 2, n)
            if np.linalg.norm(x - y) < 1e-3:
                continue
            l = req.l if req.l is not None else int(rng.integers(1, n + 1))
            direct = kernel_G(l, x, y, bump)
            if direct == 0.0:
                continue
            homog = kernel_G_homogeneous(l, x, y, bump)
            rel = abs(direct - homog) / abs(direct)
            worst = max(worst, rel)
            rows.append({"x": x.tolist(), "y": y.tolist(), "l": l,
                         "direct": direct, "homogeneous": homog,
                         "relative_defect": rel})
            used += 1
        dirs = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-1.0, 0.7]])[:, :n]
        if n > 2:
            dirs = np.concatenate([dirs, np.ones((1, n))])
        x0 = np.full(n, 0.15)
        coarse = weak_singularity_scan(bump, min(2, n), x0, dirs,
                                       np.geomspace(1e-4, 0.5, 12))
        fine = weak_singularity_scan(bump, min(2, n), x0, dirs,
                                     np.geomspace(1e-4, 0.5, 24))
        return m.KernelScanResponse(
            max_relative_defect=worst, tolerance=1e-8, passed=worst <= 1e-8,
            fitted_constant_coarse=coarse["fitted_constant"],
            fitted_constant_fine=fine["fitted_constant"], rows=rows)

    # -- symbol --------------------------------------------------------------

    @app.post("/symbol/scan", response_model=m.SymbolScanResponse)
    def symbol_scan(req: m.SymbolScanRequest):
        from ..symbol import SymbolProbe, decay_scan, k1hat_at_zero
        n = req.n
        bump = (req.bump or m.BumpSpec(n=n, center=[0] * n, r="1/2", k=4)).build()
        if req.l > n or req.j > n:
            raise HTTPException(status_code=422, detail="l and j must be <= n")
        probe = SymbolProbe(bump, l=req.l, j=req.j, directions=req.directions,
                            xi_points=req.xi_points, xi_max=req.xi_max,
                            x_points=req.x_points)
        scan = decay_scan(probe)
        x = np.full(n, 0.7)
        spot = abs(k1hat_at_zero(bump, req.l, req.j, x)
                   - (-x[req.j - 1] * (2 ** req.l - 1) / req.l))
        return m.SymbolScanResponse(
            all_plateau=scan["all_plateau"], spot_value_defect=float(spot),
            verdicts=scan["verdicts"], rows=scan["rows"],
            smoothness_note=scan["smoothness_note"])

    # -- glue ------------------------------------------------------------------

    def _build_cover(domain: str):
        from ..glue import l_domain_cover, u_domain_cover, single_box_cover, Box
        if domain == "l":
            return l_domain_cover()
        if domain == "u":
            return u_domain_cover()
        return single_box_cover(Box((0.0, 0.0), (1.0, 1.0)))

    def _glue_fixture(ctx, l, rng):
        center = [0.62, 0.62] if ctx.domain.boxes[0].hi[0] < 2.5 else [0.6, 0.6]
        return random_poly_bump_form(2, l, rng, center=center, radius=0.3)

    @app.post("/glue/homotopy-check", response_model=m.GlueCheckResponse)
    def glue_homotopy(req: m.GlueCheckRequest):
        from ..glue import homotopy_residual_composite
        ctx = _build_cover(req.domain)
        rng = np.random.default_rng(req.seed)
        u = _glue_fixture(ctx, req.l, rng)
        pts = np.concatenate([
            ctx.sample_interior(req.points, rng),
            np.asarray(u.support_center)[None, :]
            + rng.uniform(-0.2, 0.2, size=(req.points, 2)),
        ])
        results = []
        ok = True
        for side in (["R", "T"] if req.side == "both" else [req.side]):
            out = homotopy_residual_composite(ctx, u, pts, side)
            passed = out["max_residual"] <= 1e-4
            ok = ok and passed
            results.append({"side": side, "l": req.l,
                            "max_residual": out["max_residual"],
                            "tolerance": 1e-4, "passed": passed})
        return m.GlueCheckResponse(domain=req.domain, results=results,
                                   partition=ctx.partition_report(), passed=ok)

    @app.post("/glue/support-check", response_model=m.GlueCheckResponse)
    def glue_support(req: m.GlueCheckRequest):
        from ..glue import support_check_T, locality_check_R
        ctx = _build_cover(req.domain)
        rng = np.random.default_rng(req.seed)
        u = _glue_fixture(ctx, max(req.l, 1), rng)
        lo, hi = ctx.domain.bounding_box().arrays()
        outside = []
        while len(outside) < req.points:
            cand = rng.uniform(lo - 0.5, hi + 0.5, size=(4 * req.points, 2))
            keep = ~ctx.domain.contains(cand, margin=0.02)
            outside.extend(cand[keep][: req.points - len(outside)])
        out_T = support_check_T(ctx, u, np.asarray(outside))
        u_out = random_poly_bump_form(
            2, max(req.l, 1), rng,
            center=hi + np.array([-0.45, 0.5]), radius=0.35)
        interior = ctx.sample_interior(req.points, rng)
        out_R = locality_check_R(ctx, u_out, interior)
        tol_T = 1e-9 * out_T["sup_norm"]
        tol_R = 1e-9 * out_R["sup_norm"]
        ok = out_T["max_value"] <= tol_T and out_R["max_value"] <= tol_R
        return m.GlueCheckResponse(
            domain=req.domain,
            results=[{"check": "support_T", "max_value": out_T["max_value"],
                      "tolerance": tol_T},
                     {"check": "locality_R", "max_value": out_R["max_value"],
                      "tolerance": tol_R}],
            partition=ctx.partition_report(), passed=ok)

    @app.post("/glue/commutation-check", response_model=m.GlueCheckResponse)
    def glue_commutation(req: m.GlueCheckRequest):
        from ..glue import commutation_residual
        ctx = _build_cover(req.domain)
        rng = np.random.default_rng(req.seed)
        u = _glue_fixture(ctx, req.l, rng)
        pts = np.concatenate([
            ctx.sample_interior(max(2, req.points // 2), rng),
            np.array([[0.80, 0.73], [0.55, 0.35]]),
        ])
        results = []
        ok = True
        for which in ("K", "L"):
            out = commutation_residual(ctx, u, pts, which)
            passed = out["max_residual"] <= 1e-3
            ok = ok and passed
            results.append({"which": which, "l": req.l,
                            "max_residual": out["max_residual"],
                            "tolerance": 1e-3, "passed": passed})
        return m.GlueCheckResponse(domain=req.domain, results=results,
                                   partition=ctx.partition_report(), passed=ok)

    # -- suites --------------------------------------------------------------------

    @app.post("/verify/{suite}", response_model=m.SuiteReportModel)
    def verify(suite: str, config: m.RunConfig):
        if suite not in SUITES:
            raise HTTPException(status_code=404,
                                detail=f"unknown suite {suite!r}; "
                                       f"choose from {sorted(SUITES)}")
        if config.suite != suite:
            config = config.model_copy(update={"suite": suite})
        rep = run_suite(suite, config.to_suite_config())
        body = report_to_dict(rep)
        return m.SuiteReportModel(
            suite=rep.suite, seed=rep.seed, passed=rep.passed,
            max_residual=rep.max_residual,
            checks=[m.SuiteCheckModel(
                id=c.check_id, description=c.description, residual=c.residual,
                tolerance=c.tolerance, passed=c.passed, extra=body["checks"][i]["extra"])
                for i, c in enumerate(rep.checks)],
            elapsed_s=rep.elapsed_s,
            environment=environment_fingerprint(rep.elapsed_s))

    return app
