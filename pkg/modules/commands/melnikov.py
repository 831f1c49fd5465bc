"""Subcommands on the Melnikov function of a perturbation file"""

from .base import PARAM_OPTIONS, Command, CommandResult, register_command
from modules.abelian_engine import decompose_melnikov, melnikov_quadrature
from modules.melnikov_analyzer import melnikov_curve, zero_scan
from utils import print_info, print_section, print_success, print_warning
from utils.io import dump_csv
from i18n import get_translator


@register_command(
    "melnikov",
    description="I(h) = ∮ g dx − f dy at one level, or (h, I(h)) rows with --curve",
    schema='{"decomposition", "h", "annulus", "value", "error", "flagged", "flow_value"} '
           'or {"decomposition", "curves": [{"annulus", "rows": [[h, I, error]]}]}',
    options=PARAM_OPTIONS + ("pert", "h", "annulus", "curve", "grid", "h_max", "n_min", "output"),
)
class MelnikovCommand(Command):
    def execute(self, cfg) -> CommandResult:
        _t = get_translator()
        params = self.params_of(cfg)
        pert = self.perturbation_of(cfg)
        decomposition = decompose_melnikov(params, pert).to_dict()
        if cfg.curve:
            curves, rows = [], []
            for ann in self.annuli_of(params, cfg):
                curve = melnikov_curve(params, pert, ann, cfg.grid, cfg.h_max)
                curves.append({"annulus": ann.id, "rows": [list(r) for r in curve]})
                rows.extend((ann.id, h, value, error) for h, value, error in curve)
            csv = dump_csv(["annulus", "h", "I", "error"], rows, meta={"n": pert.n})
            return CommandResult({"decomposition": decomposition, "curves": curves}, csv=csv)

        annulus = self.annulus_of(params, cfg)
        res = melnikov_quadrature(params, pert, annulus, cfg.h, cfg.n_min)
        flags = []
        if res.flagged:
            flags.append(f"quadrature estimate {res.error:.3g}")
            print_warning(_t('quadrature_flagged', error=f"{res.error:.3g}"))
        else:
            print_info(f"I({cfg.h}) = {res.value:.12g}")
        payload = {"decomposition": decomposition, "h": cfg.h, "annulus": annulus.id,
                   "value": res.value, "error": res.error, "flagged": res.flagged,
                   "flow_value": annulus.flow_sign * res.value}
        return CommandResult(payload, failed=bool(flags), flags=flags)


@register_command(
    "zeros",
    description="Transversal zeros of I(h) on every annulus, with the region ceiling",
    schema='{"region", "zeros": [...], "reports": [{"annulus", "window", "zeros", "count", "ceiling", "respected"}]}',
    options=PARAM_OPTIONS + ("pert", "annulus", "grid", "h_max", "n_min", "output"),
)
class ZerosCommand(Command):
    def execute(self, cfg) -> CommandResult:
        _t = get_translator()
        params = self.params_of(cfg)
        pert = self.perturbation_of(cfg)
        reports = []
        for ann in self.annuli_of(params, cfg):
            print_section(_t('annulus_section', annulus=ann.id, lo=f"{ann.h_lo:.6g}", hi=f"{ann.h_hi:.6g}"))
            report = zero_scan(params, pert, ann, grid_size=cfg.grid, h_max_override=cfg.h_max,
                               n_min=cfg.n_min)
            reports.append(report)
            if report.identically_zero:
                print_info(_t('identically_zero', annulus=ann.id))
            else:
                print_info(_t('zeros_found', count=report.count, annulus=ann.id))
            if report.suspected_tangential:
                print_warning(_t('tangential_suspected',
                                 levels=", ".join(f"{h:.6g}" for h in report.suspected_tangential)))
            if report.ceiling is not None:
                if report.ceiling_respected:
                    print_success(_t('ceiling_respected', ceiling=report.ceiling))
                else:
                    print_warning(_t('ceiling_violated', ceiling=report.ceiling, count=report.count))
        violated = any(r.ceiling_respected is False for r in reports)
        flags = [w for r in reports for w in r.warnings]
        payload = {
            "region": reports[0].region if reports else None,
            "zeros": [z.h for r in reports for z in r.zeros],
            "reports": [r.to_dict() for r in reports],
        }
        csv = dump_csv(["annulus", "h", "width", "slope"],
                       ((r.annulus_id, z.h, z.width, z.slope) for r in reports for z in r.zeros))
        return CommandResult(payload, csv=csv, failed=violated, flags=flags)
