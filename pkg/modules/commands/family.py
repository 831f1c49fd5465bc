"""Subcommands about the unperturbed family: region, critical points, period annuli"""

from .base import PARAM_OPTIONS, Command, CommandResult, register_command
from modules.hamiltonian_family import annuli, classify_region, critical_points
from utils import print_info, print_success, print_warning
from utils.io import dump_csv
from i18n import get_translator


@register_command(
    "classify",
    description="Parameter-plane region of (a, b, c)",
    schema='{"region", "a_zero", "ab_zero"}',
    options=PARAM_OPTIONS,
)
class ClassifyCommand(Command):
    def execute(self, cfg) -> CommandResult:
        _t = get_translator()
        region = classify_region(self.params_of(cfg), cfg.classify_tol)
        print_success(_t('region_found', region=region.tag))
        return CommandResult(region.to_dict())


@register_command(
    "critical",
    description="Critical points of H with their type and level",
    schema='{"points": [{"x", "y", "kind", "level"}]}',
    options=PARAM_OPTIONS + ("output",),
)
class CriticalCommand(Command):
    def execute(self, cfg) -> CommandResult:
        _t = get_translator()
        points = critical_points(self.params_of(cfg))
        print_info(_t('critical_found', count=len(points)))
        csv = dump_csv(["x", "y", "kind", "level"], ((p.x, p.y, p.kind, p.level) for p in points))
        return CommandResult({"points": [p.to_dict() for p in points]}, csv=csv)


@register_command(
    "annuli",
    description="Period annuli of the unperturbed flow",
    schema='{"region", "annuli": [{"id", "h_lo", "h_hi", "seed_point", "symmetry", "enclosed", "flow_ccw"}]}',
    options=PARAM_OPTIONS + ("output",),
)
class AnnuliCommand(Command):
    def execute(self, cfg) -> CommandResult:
        _t = get_translator()
        params = self.params_of(cfg)
        region = classify_region(params, cfg.classify_tol)
        found = annuli(params)
        if found:
            print_info(_t('annuli_found', count=len(found)))
        else:
            print_warning(_t('no_annuli'))
        csv = dump_csv(["id", "h_lo", "h_hi", "flow_ccw"],
                       ((ann.id, ann.h_lo, ann.h_hi, ann.flow_ccw) for ann in found),
                       meta={"region": region.tag})
        return CommandResult({"region": region.tag, "annuli": [ann.to_dict() for ann in found]}, csv=csv)
