"""
Spectral Lab
Task dispatcher: turns a validated RunConfig into region files, sweeps and checks
"""

import logging
import math
from typing import Any, Dict, List, Optional

import numpy as np

import config
from errors import ConfigError, GateRefusedError, SpectralabError
from grid_calculus import GridField, TorusGrid, generalized_gaussian_check, multiplier_scaling_sweep
from norm_metrics import ScalingReport
from output_client import OutputClient, create_client
from perturbation import (
    PerturbedOperator,
    davies_gaffney_defaults,
    davies_gaffney_fit,
    neumann_dense_discrepancy,
    perturbed_resolvent_sweep,
    poisson_density,
    potential_from_config,
    resolvent_identity_check,
    resolvent_power_sweep,
    restriction_lambda_list,
    restriction_stability,
    restriction_sweep,
    stone_density,
)
from region_calc import (
    ExponentPoint,
    RegionParams,
    krs_region,
    sobolev_line_region,
    negative_index_region,
    perturbed_restriction_region,
)
from resolvent_lab import br_negative_sweep, uniform_sobolev_sweep, write_sweep
from suites import VerificationCoordinator
from symbol import SymbolPoly, from_config, laplacian_pow_k
from tools import (
    TASK_NAMES,
    apply_overrides,
    parse_complex,
    parse_exponent,
    parse_point,
    parse_rational,
    validate_run_config,
)
from weyl_calculus import chi_convolve, DistPower, Family, jump_identity_resolve, reproduction_error, smooth_bump

logger = logging.getLogger(__name__)

DEFAULT_N = {1: 256, 2: 64, 3: 32}
DENSE_N = {1: 256, 2: 64, 3: 16}
GAUSSIAN_N = {1: 256, 2: 256}
MULTIPLIER_N = {1: 16384, 2: 1024}
SOBOLEV_ARGUMENTS = (math.pi / 6, math.pi / 2, 5 * math.pi / 6)


class SpectralLab:
    """Runs lab tasks against one RunConfig and one output client"""

    def __init__(self, run_config: Optional[Dict] = None, client: Optional[OutputClient] = None,
                 verbose: bool = False):
        self.run_config = validate_run_config(dict(run_config or {}))
        self.seed = self.run_config.get("seed", config.SEED)
        self.client = client or create_client(self.run_config.get("output_dir"), self.run_config, self.seed)
        self.verbose = verbose
        self.threads = self.run_config.get("threads")

    # ==================== CONFIG BLOCKS ====================

    def _block(self, name: str) -> Dict[str, Any]:
        return dict(self.run_config.get(name) or {})

    def _symbol(self, n_default: int = 3, m_default: int = 2) -> SymbolPoly:
        spec = self._block("symbol")
        if not spec:
            grid = self._block("grid")
            return laplacian_pow_k(grid.get("n", n_default), m_default // 2)
        if "builtin" not in spec and "terms" not in spec:
            spec = {"builtin": "norm_power_m", "m": m_default, **spec}
        return from_config(spec)

    def _grid(self, n: int, default_N: Optional[int] = None) -> TorusGrid:
        spec = self._block("grid")
        if spec and spec["n"] != n:
            raise ConfigError(f"grid dimension {spec['n']} does not match symbol dimension {n}")
        if not spec:
            N = default_N or DEFAULT_N.get(n, 16)
            # spacing pi/16 on every default grid
            spec = {"n": n, "N": N, "L": N * math.pi / 16}
        return TorusGrid(spec["n"], spec["N"], float(spec["L"]))

    # ==================== TASKS ====================

    def _region(self) -> Dict[str, Any]:
        block = self._block("region")
        case = block.get("case", 3)
        n, m = block.get("n", 3), block.get("m", 2)
        alpha = parse_rational(block.get("alpha", 0))

        if isinstance(case, int) or str(case).isdigit():
            p = parse_rational(block["p"]) if "p" in block else None
            p0 = parse_rational(block.get("p0", 1))
            params = RegionParams(n=n, m=m, alpha=alpha, p=p, p0=p0)
            region = negative_index_region(params, int(case), block.get("gaussian_bounds", False),
                                           block.get("extended_case4", False))
        elif case == "krs":
            region = krs_region(n, m, alpha)
        elif case == "sobolev":
            region = sobolev_line_region(n, m)
        elif case == "restriction":
            region = perturbed_restriction_region(n, m)
        else:
            raise ConfigError(f"unknown region case {case!r}; use 1-4, 'krs', 'sobolev' or 'restriction'")

        name = f"region_{region.case_id.value}"
        body = region.to_json()
        result: Dict[str, Any] = {
            "case": region.case_id.value,
            "vertices": [str(v) for v in region.polygon()],
            "landmarks": {k: str(v) for k, v in region.landmarks.items()},
        }
        if "query" in block:
            inv_p, inv_q = parse_point(block["query"])
            point = ExponentPoint(inv_p, inv_q)
            inside = region.contains(point)
            result["query"] = {"point": str(point), "inside": inside, "violated": region.violated(point)}
            body["query"] = {"point": point.to_json(), "inside": inside}
        files = {
            "json": str(self.client.write_json(name, body)),
            "csv": str(self.client.write_rows(name, region.to_csv_rows(), {"case": region.case_id.value,
                                                                          "params": region.params.to_json()})),
        }
        result["files"] = files
        return result

    def _verify(self) -> Dict[str, Any]:
        block = self._block("verify")
        context: Dict[str, Any] = {"seed": self.seed, "filter": block.get("filter")}
        if self._block("symbol"):
            context["symbol"] = self._symbol(2)
        coordinator = VerificationCoordinator(verbose=self.verbose)
        report = coordinator.run_team(context, block.get("filter"))
        self.client.write_rows("verify", report.to_rows(), {"suites": report.suites})
        path = self.client.write_json("verify", report.to_json())
        return {"verdict": report.verdict.value, "counts": report.counts, "failures": report.failures,
                "files": {"json": str(path)}}

    def _sweep(self) -> Dict[str, Any]:
        block = self._block("sweep")
        kind = block.get("kind")
        if kind is None:
            raise ConfigError("sweep needs a kind")
        handler = {
            "sobolev": self._sweep_sobolev,
            "restriction": self._sweep_restriction,
            "bochner-riesz": self._sweep_bochner_riesz,
            "gaussian": self._sweep_gaussian,
            "davies-gaffney": self._sweep_davies_gaffney,
            "multiplier": self._sweep_multiplier,
            "resolvent-power": self._sweep_resolvent_power,
            "perturbed-resolvent": self._sweep_perturbed_resolvent,
        }[kind]
        return handler(block)

    def _lambda_list(self, block: Dict, P: SymbolPoly, grid: TorusGrid) -> List[float]:
        if "lambda_list" in block:
            return [float(x) for x in block["lambda_list"]]
        high = (3 * grid.N / 8 * grid.frequency_spacing) ** P.m
        return list(np.geomspace(high / 10 ** block.get("decades", 1.0), high, block.get("points", 6)))

    def _z_list(self, block: Dict) -> List[complex]:
        if "z_list" in block:
            return [parse_complex(z) for z in block["z_list"]]
        moduli = np.geomspace(1.0, 10 ** block.get("decades", 1.0), block.get("points", 4))
        arguments = block.get("arguments", SOBOLEV_ARGUMENTS)
        return [r * complex(math.cos(t), math.sin(t)) for r in moduli for t in arguments]

    def _operator_grid(self, n: int, V_spec) -> TorusGrid:
        """Dense operators need N^n within DENSE_CAP unless a grid is configured"""
        if V_spec in (None, "zero"):
            return self._grid(n)
        return self._grid(n, default_N=DENSE_N.get(n))

    def _judge(self, report: ScalingReport) -> ScalingReport:
        tolerances = self._block("tolerances")
        if tolerances:
            report.judge(tolerance=tolerances.get("slope"), r2_floor=tolerances.get("r2"),
                         ratio_bound=tolerances.get("ratio"))
        return report

    def _finish(self, report: ScalingReport, name: str) -> Dict[str, Any]:
        self._judge(report)
        files = write_sweep(report, self.client, name)
        return {"report": report.to_summary(), "verdict": report.verdict.value, "files": files}

    def _sweep_sobolev(self, block: Dict) -> Dict[str, Any]:
        P = self._symbol(3)
        grid = self._grid(P.n)
        p = parse_exponent(block.get("p", "6/5"))
        q = parse_exponent(block.get("q", 6))
        report = uniform_sobolev_sweep(P, grid, p, q, self._z_list(block), seed=self.seed, threads=self.threads)
        return self._finish(report, "sweep_sobolev")

    def _sweep_restriction(self, block: Dict) -> Dict[str, Any]:
        P = self._symbol(3)
        potential = self.run_config.get("potential")
        grid = self._operator_grid(P.n, potential)
        p = parse_exponent(block.get("p", 1))
        V = potential_from_config(potential, grid, P.m)
        width = block.get("width", 0.1)
        if "lambda_list" in block:
            lambdas = [float(x) for x in block["lambda_list"]]
        else:
            lambdas, width = restriction_lambda_list(P, grid, width, block.get("points", 6),
                                                     block.get("decades", 1.0))
        if V.is_zero or not block.get("compare_free", True):
            mode = "matrix_free" if V.is_zero else "dense"
            report = restriction_sweep(PerturbedOperator(P, V, mode), p, lambdas, width, seed=self.seed,
                                       threads=self.threads)
            return self._finish(report, "sweep_restriction")
        paired = restriction_stability(P, V, p, lambdas, width, seed=self.seed, threads=self.threads)
        for side in ("free", "perturbed"):
            self._judge(paired[side])
        free = write_sweep(paired["free"], self.client, "sweep_restriction_free")
        perturbed = write_sweep(paired["perturbed"], self.client, "sweep_restriction_perturbed")
        summary = {
            "free": paired["free"].to_summary(),
            "perturbed": paired["perturbed"].to_summary(),
            "slope_shift": paired["slope_shift"],
            "stable": paired["stable"],
            "smallness": paired["smallness"],
        }
        path = self.client.write_json("sweep_restriction", summary)
        return {"report": summary, "verdict": "PASS" if paired["stable"] else "FAIL",
                "files": {"free": free, "perturbed": perturbed, "json": str(path)}}

    def _sweep_bochner_riesz(self, block: Dict) -> Dict[str, Any]:
        P = self._symbol(3)
        grid = self._grid(P.n)
        alpha = block.get("alpha", 0.5)
        p = parse_exponent(block.get("p", 1))
        q = parse_exponent(block.get("q", "inf"))
        report = br_negative_sweep(P, grid, alpha, p, q, self._lambda_list(block, P, grid),
                                   eps=block.get("eps"), seed=self.seed, threads=self.threads)
        return self._finish(report, "sweep_bochner_riesz")

    def _sweep_gaussian(self, block: Dict) -> Dict[str, Any]:
        P = self._symbol(1)
        grid = self._grid(P.n, default_N=GAUSSIAN_N.get(P.n))
        p = parse_exponent(block.get("p", 1))
        if "t_list" in block:
            t_list = [float(t) for t in block["t_list"]]
        else:
            # kernel images overlap by exp(-(L/t)^2 / 8), negligible up to L/6
            t_list = list(np.geomspace(4 * grid.L / grid.N, grid.L / 6, block.get("points", 6)))
        report = generalized_gaussian_check(P, grid, p, t_list, seed=self.seed)
        return self._finish(report, "sweep_gaussian")

    def _sweep_davies_gaffney(self, block: Dict) -> Dict[str, Any]:
        P = self._symbol(1)
        grid = self._grid(P.n, default_N=DENSE_N.get(P.n))
        V = potential_from_config(self.run_config.get("potential"), grid, P.m)
        Pop = PerturbedOperator(P, V, "dense")
        t_list, ball_pairs = davies_gaffney_defaults(Pop, points=block.get("points", 4))
        if "t_list" in block:
            t_list = [float(t) for t in block["t_list"]]
        fit = davies_gaffney_fit(Pop, t_list, ball_pairs)
        rows = [{"abscissa": a, "norm": v} for a, v in fit.points]
        meta = {"m": P.m, "potential": V.name, "grid": grid.to_json(), "t_list": t_list}
        files = {"csv": str(self.client.write_rows("sweep_davies_gaffney", rows, meta)),
                 "json": str(self.client.write_json("sweep_davies_gaffney", {**fit.to_json(), **meta}))}
        ok = fit.c > 0 and fit.r2 >= self._block("tolerances").get("r2", config.R2_FLOOR)
        return {"report": fit.to_json(), "verdict": "PASS" if ok else "FAIL", "files": files}

    def _sweep_multiplier(self, block: Dict) -> Dict[str, Any]:
        P = self._symbol(1)
        grid = self._grid(P.n, default_N=MULTIPLIER_N.get(P.n))
        F = smooth_bump(0.5, 1.0, 1e-3, window=(0.0, 1.5))
        if "R_list" in block:
            R_list = [float(r) for r in block["R_list"]]
        else:
            # two decades of R with the top support sphere at 0.9 Nyquist
            top = 0.9 * np.pi / grid.spacing
            R_list = list(np.geomspace(top / 10 ** block.get("decades", 2.0), top, block.get("points", 6)))
        report = multiplier_scaling_sweep(F, P, grid, R_list, seed=self.seed)
        return self._finish(report, "sweep_multiplier")

    def _sweep_resolvent_power(self, block: Dict) -> Dict[str, Any]:
        P = self._symbol(3)
        potential = self.run_config.get("potential")
        grid = self._operator_grid(P.n, potential)
        V = potential_from_config(potential, grid, P.m)
        Pop = PerturbedOperator(P, V, "matrix_free" if V.is_zero else "dense")
        p = parse_exponent(block.get("p", 1))
        q = parse_exponent(block.get("q", 2))
        if "t_list" in block:
            t_list = [float(t) for t in block["t_list"]]
        else:
            top = (grid.L / 8) ** P.m
            t_list = list(np.geomspace(top / 10 ** block.get("decades", 1.0), top, block.get("points", 6)))
        report = resolvent_power_sweep(Pop, p, q, t_list, seed=self.seed, threads=self.threads)
        return self._finish(report, "sweep_resolvent_power")

    def _sweep_perturbed_resolvent(self, block: Dict) -> Dict[str, Any]:
        P = self._symbol(3)
        grid = self._grid(P.n, default_N=DENSE_N.get(P.n))
        V = potential_from_config(self.run_config.get("potential"), grid, P.m)
        Pop = PerturbedOperator(P, V, "dense")
        p = parse_exponent(block.get("p", "6/5"))
        report = perturbed_resolvent_sweep(Pop, p, self._z_list(block), seed=self.seed, threads=self.threads)
        return self._finish(report, "sweep_perturbed_resolvent")

    def _perturb(self) -> Dict[str, Any]:
        block = self._block("perturb")
        P = self._symbol(2)
        grid = self._grid(P.n, default_N=16)
        V = potential_from_config(self.run_config.get("potential", "ball:0.2,1.0"), grid, P.m)
        Pop = PerturbedOperator(P, V, "dense")
        z = parse_complex(block.get("z", -1.0))
        lam = float(block.get("lam", 1.0))
        eps = float(block.get("eps", 0.05))
        f = GridField.random(grid, self.seed).flat

        result: Dict[str, Any] = {"potential": V.name, "smallness": V.smallness.to_json(), "z": [z.real, z.imag]}
        try:
            kwargs = {k: block[k] for k in ("k_max", "tol") if k in block}
            p_gate = parse_exponent(block.get("p", 2))
            result["neumann"] = neumann_dense_discrepancy(Pop, z, f, p_for_gate=p_gate, seed=self.seed, **kwargs)
        except GateRefusedError as exc:
            result["neumann"] = {"refused": str(exc)}

        direct = stone_density(Pop, lam, eps, f)
        spectral = float(poisson_density(Pop, lam, eps, f)[0])
        result["stone"] = {"lam": lam, "eps": eps, "resolvent": direct, "eigendecomposition": spectral,
                           "relative_error": abs(direct - spectral) / max(abs(spectral), 1e-300)}
        result["resolvent_identity"] = resolvent_identity_check(Pop, z if z.imag else z + 1j, complex(lam, 1.0))
        result["files"] = {"json": str(self.client.write_json("perturb", result))}
        return result

    def _weyl(self) -> Dict[str, Any]:
        block = self._block("weyl")
        h = float(block.get("h", 1e-3))
        jumps = []
        for alpha in block.get("alpha_list", [0.25, 0.5, 0.75]):
            resolution = jump_identity_resolve(alpha)
            jumps.append({"alpha": alpha, "convention": resolution.sign_convention,
                          "error": resolution.max_error, "candidates": resolution.candidate_errors})
        F = smooth_bump(1.0, 2.0, h, window=(0.0, 3.0))
        reproduction = [{"nu": nu, "error": reproduction_error(F, nu) / F.sup()}
                        for nu in block.get("nu_list", [0.5, 1.0, 1.5])]
        convolutions = []
        for w, z in ((-0.5, -0.5), (0.0, 0.5), (0.5, 1.0)):
            product = chi_convolve(DistPower.chi(Family.MINUS, w), DistPower.chi(Family.MINUS, z), h=h)
            convolutions.append({"w": w, "z": z, "result": product.describe(),
                                 "quadrature_error": product.quadrature_error})
        result = {"jump_identity": jumps, "reproduction": reproduction, "convolution": convolutions}
        self.client.write_rows("weyl_jump", [{k: v for k, v in j.items() if k != "candidates"} for j in jumps])
        result["files"] = {"json": str(self.client.write_json("weyl", result))}
        return result

    # ==================== DISPATCH ====================

    def process_task(self, task: str, overrides: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Run one task; library errors come back as {"error", "kind"}"""
        try:
            if overrides:
                self.run_config = apply_overrides(self.run_config, overrides)
            if task == "region":
                result = self._region()
            elif task == "verify":
                result = self._verify()
            elif task == "sweep":
                result = self._sweep()
            elif task == "perturb":
                result = self._perturb()
            elif task == "weyl":
                result = self._weyl()
            else:
                result = {"error": f"Unknown task: {task}; known: {TASK_NAMES}", "kind": ConfigError.kind}
        except SpectralabError as exc:
            logger.error("task %s failed (%s): %s", task, exc.kind, exc)
            result = {"error": str(exc), "kind": exc.kind}
        return result
