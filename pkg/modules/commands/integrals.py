"""Subcommands on single orbits: tracing, Abelian integrals, reductions"""

from .base import PARAM_OPTIONS, Command, CommandResult, register_command
from modules.abelian_engine import derivative_Iij, generator_vector, monomial_integral, reduce_monomial
from modules.level_curve_tracer import orbit_csv, trace_orbit
from utils import print_info, print_success, print_warning
from i18n import get_translator


@register_command(
    "trace",
    description="Trace the closed orbit at level h (CSV output gives the polyline)",
    schema='{"h", "annulus_id", "vertices", "period", "closure_gap", "level_error", "area", "flow_ccw"}',
    options=PARAM_OPTIONS + ("h", "annulus", "n_min", "level_tol", "output"),
)
class TraceCommand(Command):
    def execute(self, cfg) -> CommandResult:
        _t = get_translator()
        params = self.params_of(cfg)
        orbit = trace_orbit(params, self.annulus_of(params, cfg), cfg.h, cfg.n_min, cfg.level_tol)
        print_success(_t('orbit_traced', n=orbit.n, gap=f"{orbit.closure_gap:.3g}"))
        return CommandResult(orbit.to_dict(), csv=orbit_csv(orbit))


@register_command(
    "abelian",
    description="I_ij(h), its derivative and the nine generators at one level",
    schema='{"h", "annulus", "i", "j", "value", "error", "flagged", "derivative", "generators"}',
    options=PARAM_OPTIONS + ("h", "annulus", "i", "j", "n_min"),
)
class AbelianCommand(Command):
    def execute(self, cfg) -> CommandResult:
        _t = get_translator()
        params = self.params_of(cfg)
        annulus = self.annulus_of(params, cfg)
        res = monomial_integral(params, annulus, cfg.h, cfg.i, cfg.j, cfg.n_min)
        derivative = derivative_Iij(params, annulus, cfg.h, cfg.i, cfg.j, n_min=cfg.n_min)
        gv = generator_vector(params, annulus, cfg.h, cfg.n_min)
        flags = list(derivative.flags) + list(gv.flags)
        if res.flagged:
            flags.append(f"I{cfg.i}{cfg.j}: quadrature estimate {res.error:.3g}")
            print_warning(_t('quadrature_flagged', error=f"{res.error:.3g}"))
        if derivative.cross_check is not None and derivative.flags:
            print_warning(_t('derivative_flagged', gap=f"{abs(derivative.value - derivative.cross_check):.3g}"))
        payload = {
            "h": cfg.h, "annulus": annulus.id, "i": cfg.i, "j": cfg.j,
            "value": res.value, "error": res.error, "flagged": res.flagged,
            "derivative": derivative.to_dict(),
            "generators": gv.to_dict(),
        }
        return CommandResult(payload, failed=bool(flags), flags=flags)


@register_command(
    "reduce",
    description="Express I_ij through the generators; with --level also compare against quadrature",
    schema='{"target", "coefficients", "degrees", "bounds", "within_bounds", "closure"?}',
    options=PARAM_OPTIONS + ("i", "j", "h", "annulus", "n_min"),
)
class ReduceCommand(Command):
    def execute(self, cfg) -> CommandResult:
        _t = get_translator()
        params = self.params_of(cfg)
        reduction = reduce_monomial(params, cfg.i, cfg.j)
        within = reduction.within_bounds()
        if within:
            print_success(_t('reduction_within_bounds', i=cfg.i, j=cfg.j))
        else:
            print_warning(_t('reduction_out_of_bounds', i=cfg.i, j=cfg.j))
        payload = {**reduction.to_dict(), "within_bounds": within}
        if cfg.h is not None:
            annulus = self.annulus_of(params, cfg)
            direct = monomial_integral(params, annulus, cfg.h, cfg.i, cfg.j, cfg.n_min).value
            reduced = reduction.evaluate(generator_vector(params, annulus, cfg.h, cfg.n_min))
            gap = abs(direct - reduced) / max(1.0, abs(direct))
            print_info(f"I{cfg.i}{cfg.j}({cfg.h}) = {direct:.12g}, {reduced:.12g}")
            payload["closure"] = {"h": cfg.h, "annulus": annulus.id, "quadrature": direct,
                                  "reduced": reduced, "relative_gap": gap}
        return CommandResult(payload, failed=not within)
