"""Subcommands checking the Picard–Fuchs and Riccati systems against quadrature"""

from typing import List

import config
from .base import PARAM_OPTIONS, Command, CommandResult, register_command
from modules.hamiltonian_family import annuli
from modules.picard_fuchs import (
    VerificationRow, applicable_selectors, g_zero_split, pf_matrices, riccati_system,
    verify_pf, verify_riccati,
)
from utils import print_info, print_success, print_warning
from utils.io import dump_csv
from i18n import get_translator


def _summarize(rows: List[VerificationRow], tol: float) -> CommandResult:
    _t = get_translator()
    checked = [r for r in rows if r.residual is not None]
    passed = [r for r in checked if r.residual < tol]
    skipped = len(rows) - len(checked)
    message = _t('pf_summary', passed=len(passed), total=len(checked), tol=tol)
    if len(passed) == len(checked):
        print_success(message)
    else:
        print_warning(message)
    if skipped:
        print_info(_t('pf_skipped', count=skipped))
    worst = max((r.residual for r in checked), default=0.0)
    payload = {"tolerance": tol, "checked": len(checked), "passed": len(passed),
               "skipped": skipped, "max_residual": worst, "rows": [r.to_dict() for r in rows]}
    csv = dump_csv(["which", "annulus", "h", "residual"],
                   ((r.which, r.annulus_id, r.h, r.residual) for r in rows), meta={"tolerance": tol})
    return CommandResult(payload, csv=csv, failed=len(passed) != len(checked))


@register_command(
    "pf-verify",
    description="Residuals of V = (A h + B) V' on a grid of every annulus (all applicable selectors by default)",
    schema='{"systems", "splits", "tolerance", "checked", "passed", "skipped", "max_residual", "rows"}',
    options=PARAM_OPTIONS + ("which", "points", "output"),
)
class PFVerifyCommand(Command):
    def execute(self, cfg) -> CommandResult:
        params = self.params_of(cfg)
        selectors = [cfg.which] if cfg.which else applicable_selectors(params)
        result = _summarize(verify_pf(params, cfg.which, cfg.points), config.PF_RESIDUAL_TOL)
        result.payload = {
            "systems": [pf_matrices(params, sel).to_dict() for sel in selectors],
            "splits": [g_zero_split(params, ann).to_dict() for ann in annuli(params)],
            **result.payload,
        }
        return result


@register_command(
    "riccati-verify",
    description="Residuals of the Riccati equation of one generator ratio (omega1..omega3, omegabar1, omegabar2)",
    schema='{"system", "tolerance", "checked", "passed", "skipped", "max_residual", "rows"}',
    options=PARAM_OPTIONS + ("which", "points", "output"),
)
class RiccatiVerifyCommand(Command):
    def execute(self, cfg) -> CommandResult:
        params = self.params_of(cfg)
        which = self.require(cfg, "which")
        system = riccati_system(params, which)
        result = _summarize(verify_riccati(params, which, cfg.points), config.RICCATI_TOL)
        result.payload = {"system": system.to_dict(), **result.payload}
        return result
