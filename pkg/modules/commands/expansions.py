"""Subcommands for the (−1, −2, 1) family: center and loop expansions, coexistence patterns"""

import numpy as np

from .base import Command, CommandResult, register_command
from modules.charts import alpha_transforms
from modules.homoclinic_expansion import (
    WINDOW_NAMES, design_homoclinic_three, distribution_search, distribution_table,
    loop_constants, saddle_constant,
)
from modules.hopf_expansion import (
    HopfDelta, delta_zero, design_hopf_three, hopf_coefficients, jacobian,
)
from utils import print_info, print_success, print_warning
from utils.errors import ConfigError
from utils.io import dump_csv, load_perturbation
from i18n import get_translator


def _alpha_from_file(path: str) -> np.ndarray:
    parsed = load_perturbation(path)
    if parsed.get("alpha") is not None:
        return np.asarray(parsed["alpha"], dtype=float)
    if parsed.get("baralpha") is not None:
        return alpha_transforms(parsed["baralpha"], "alphabar", "alpha")
    raise ConfigError("expected alpha0..alpha3 or baralpha0..baralpha3 keys", {"path": path})


@register_command(
    "hopf",
    description="Center coefficients of a given alpha (--pert), or a three-zero design at --center",
    schema='{"center", "delta", "coefficients", "zeros": [h...], "window", ...}',
    options=("pert", "center", "alpha3"),
)
class HopfCommand(Command):
    def execute(self, cfg) -> CommandResult:
        _t = get_translator()
        jac = jacobian(cfg.center)
        start = delta_zero(cfg.center, cfg.alpha3)
        common = {"jacobian_det": float(np.linalg.det(jac)), "delta_zero": start.as_array().tolist()}
        if cfg.pert is not None:
            delta = HopfDelta.from_array(_alpha_from_file(cfg.pert))
            series = hopf_coefficients(delta, cfg.center, check=True)
            print_info(_t('hopf_coefficients', center=cfg.center))
            for flag in series.flags:
                print_warning(flag)
            payload = {"center": cfg.center, "delta": delta.to_dict(), **series.to_dict(), **common}
            return CommandResult(payload, failed=bool(series.flags), flags=list(series.flags))

        design = design_hopf_three(cfg.center, cfg.alpha3)
        print_success(_t('hopf_design_done', center=cfg.center, epsilon=design.epsilon,
                         attempts=design.attempts))
        return CommandResult({**design.to_dict(), **common})


@register_command(
    "homoclinic-constants",
    description="Loop constants A0..A6 with their quadrature pieces and the measured saddle constant",
    schema='{"constants": {"A0".."A6"}, "errors", "pieces", "published", "published_deviation", "q"}',
    options=("q", "output"),
)
class HomoclinicConstantsCommand(Command):
    def execute(self, cfg) -> CommandResult:
        _t = get_translator()
        constants = loop_constants()
        q = saddle_constant(cfg.q)
        print_success(_t('constants_done'))
        for name, deviation in constants.published_deviation().items():
            print_info(_t('constant_deviation', name=name, value=f"{constants[name]:.10f}",
                          published=f"{constants.to_dict()['published'][name]:.10f}",
                          deviation=f"{deviation:.2e}"))
        print_info(_t('saddle_constant', q=f"{q:.10g}"))
        data = constants.to_dict()
        payload = {"constants": data.pop("values"), **data, "q": q}
        csv = dump_csv(["name", "value", "error"],
                       ((n, constants[n], constants.errors[n]) for n in constants.values))
        return CommandResult(payload, csv=csv)


@register_command(
    "homoclinic-design",
    description="Three zeros of I1 near the inner loop, with the I3 count in the same window",
    schema='{"constants", "design": {"alphabar", "alpha", "mu", "q"}, "verification": {"counts", "window"}}',
    options=("alpha3", "q"),
)
class HomoclinicDesignCommand(Command):
    def execute(self, cfg) -> CommandResult:
        _t = get_translator()
        design = design_homoclinic_three(cfg.alpha3, cfg.q)
        print_success(_t('homoclinic_design_done', attempts=design.attempts))
        print_info(_t('outer_count', count=design.outer_report.count))
        data = design.to_dict()
        payload = {
            "constants": loop_constants().values,
            "design": {k: data[k] for k in ("alphabar", "alpha", "mu", "q", "expansion", "staircase")},
            "verification": {"counts": {"I1": data["count"], "I3": data["outer_count"]},
                             "zeros": {"I1": data["zeros"], "I3": data["outer_zeros"]},
                             "window": data["window"], "attempts": data["attempts"],
                             "polished": data["polished"]},
        }
        return CommandResult(payload)


@register_command(
    "distributions",
    description="Realize one coexistence pattern (--target N_M1 N_M2 N_I1 N_I2 N_I3) or all of them (--all)",
    schema='{"results": [{"target", "realized", "matched", "alpha", "alphabar", "leading", "windows", "zeros"}], '
           '"matched", "total"}',
    options=("target", "all", "alpha3", "q", "output"),
)
class DistributionsCommand(Command):
    def execute(self, cfg) -> CommandResult:
        _t = get_translator()
        if cfg.all:
            results = distribution_table(cfg.alpha3, cfg.q)
        else:
            target = self.require(cfg, "target")
            results = [distribution_search(target, cfg.alpha3, cfg.q, strict=False)]
        matched = 0
        for result in results:
            target = tuple(result.target)
            if result.matched:
                matched += 1
                print_success(_t('distribution_matched', target=target))
            else:
                print_warning(_t('distribution_missed', target=target, realized=tuple(result.realized)))
        print_info(_t('distributions_summary', matched=matched, total=len(results)))
        csv = dump_csv(["target"] + [f"realized_{n}" for n in WINDOW_NAMES] + ["matched"],
                       ((" ".join(map(str, r.target)), *r.realized, r.matched) for r in results))
        payload = {"results": [r.to_dict() for r in results], "matched": matched, "total": len(results)}
        return CommandResult(payload, csv=csv, failed=matched != len(results))
