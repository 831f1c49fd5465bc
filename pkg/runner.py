"""
Command dispatch for the Abelian integral toolkit

run(command, config) executes one subcommand and writes its artifact (JSON
or CSV) to standard output; diagnostics go to standard error. The exit
status is 0 on success, 1 on domain errors and 2 when a numerical check
failed.
"""

import argparse
import sys
from typing import Any, Dict, Optional, TextIO

import config
from modules.commands import CommandRegistry, CommandResult
from utils import print_error, print_header, print_info
from utils.errors import AbelianError, ConfigError
from utils.io import RunConfig, dump_json, load_run_config
from i18n import get_translator

# RunConfig field -> (flags, argparse keyword arguments)
OPTION_SPECS: Dict[str, Any] = {
    "a": (("-a",), {"type": float, "help": "coefficient of x⁴"}),
    "b": (("-b",), {"type": float, "help": "coefficient of x²y²"}),
    "c": (("-c",), {"type": float, "help": "coefficient of y⁴ (nonzero)"}),
    "swapped": (("--swapped",), {"action": "store_true", "help": "use the x ↔ y chart"}),
    "classify_tol": (("--classify-tol",), {"type": float, "help": "tolerance of the region inequalities"}),
    "pert": (("--pert", "-p"), {"type": str, "help": "perturbation file (a_ij/b_ij, alpha*, baralpha* keys)"}),
    "h": (("--level", "-L"), {"type": float, "dest": "h", "help": "energy level h"}),
    "annulus": (("--annulus", "-A"), {"type": int, "help": "annulus id (default: every annulus)"}),
    "i": (("-i",), {"type": int, "help": "x exponent of the monomial"}),
    "j": (("-j",), {"type": int, "help": "y exponent of the monomial"}),
    "grid": (("--grid", "-g"), {"type": int, "help": f"scan grid size (default: {config.ZERO_GRID_DEFAULT})"}),
    "n_min": (("--n-min",), {"type": int, "help": f"minimum orbit vertices (default: {config.N_MIN_DEFAULT})"}),
    "level_tol": (("--level-tol",), {"type": float, "help": "tolerance on |H - h| at orbit vertices"}),
    "h_max": (("--h-max",), {"type": float, "help": f"cutoff of unbounded annuli (default: {config.H_MAX_DEFAULT})"}),
    "which": (("--which", "-w"), {"type": str, "help": "selector V1..V7 or omega1..omegabar2"}),
    "points": (("--points",), {"type": int, "help": f"verification grid points (default: {config.PF_GRID_POINTS})"}),
    "curve": (("--curve",), {"action": "store_true", "help": "emit (h, I(h)) rows"}),
    "center": (("--center",), {"choices": ["first", "second"], "help": "center of the (-1, -2, 1) family"}),
    "alpha3": (("--alpha3",), {"type": float, "help": "fixed alpha3 (nonzero, default 1)"}),
    "q": (("--q",), {"type": float, "help": "saddle constant (default: measured)"}),
    "target": (("--target", "-t"), {"type": int, "nargs": 5, "metavar": "N",
                                    "help": "pattern N_M1 N_M2 N_I1 N_I2 N_I3"}),
    "all": (("--all",), {"action": "store_true", "help": "every coexistence pattern"}),
    "output": (("--output", "-o"), {"choices": list(config.OUTPUT_FORMATS), "help": "json (default) or csv"}),
}

EPILOG = """
Examples:
  # Region of the parameter point
  python run-abelian.py classify -a 3 -b -3 -c 1

  # Closed orbit at h = 0.1 as a CSV polyline
  python run-abelian.py trace -a 3 -b -3 -c 1 --level 0.1 -o csv

  # Zeros of the Melnikov function of a perturbation file
  python run-abelian.py zeros -a 3 -b -3 -c 1 --pert pert.txt

  # Loop constants and a three-zero design near the loop
  python run-abelian.py homoclinic-constants
  python run-abelian.py homoclinic-design --alpha3 1

  # All coexistence patterns, in Chinese
  python run-abelian.py distributions --all --lang zh
"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="run-abelian.py",
        description="Abelian integrals and Melnikov zeros of H = x² − y² + a x⁴ + b x²y² + c y⁴",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    parser.add_argument("--config", type=str, default=None, help="YAML run configuration")
    parser.add_argument("--lang", "--language", type=str, choices=["en", "zh"], default="en",
                        help="Language: en (English) or zh (Chinese)")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    for command in CommandRegistry.all():
        sub = subparsers.add_parser(command.name, help=command.description, description=command.help_text,
                                    formatter_class=argparse.RawDescriptionHelpFormatter)
        for name in command.options:
            flags, kwargs = OPTION_SPECS[name]
            kwargs = dict(kwargs)
            kwargs.setdefault("dest", name)
            kwargs["default"] = None
            sub.add_argument(*flags, **kwargs)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """RunConfig from defaults, then the YAML file, then the flags"""
    base = RunConfig()
    if args.config:
        base = load_run_config(args.config)
        print_info(get_translator()('config_loaded', path=args.config))
    overrides = {k: v for k, v in vars(args).items() if k not in ("config", "lang")}
    return base.merged(overrides)


def execute(command: str, cfg: RunConfig) -> CommandResult:
    handler = CommandRegistry.get(command)
    if handler is None:
        raise ConfigError(get_translator()('unknown_command', command=command),
                          {"command": command, "commands": CommandRegistry.names()})
    return handler.execute(cfg.merged({"command": command}))


def render(command: str, result: CommandResult, cfg: RunConfig) -> str:
    if cfg.output == "csv" and result.csv is not None:
        return result.csv
    payload = {"command": command, **result.payload}
    if result.flags:
        payload["flags"] = result.flags
    return dump_json(payload) + "\n"


def run(command: str, cfg: RunConfig, stream: Optional[TextIO] = None) -> int:
    """Execute one subcommand, write its artifact, return the exit status"""
    stream = stream or sys.stdout
    _t = get_translator()
    print_header(f"{_t('app_title')}: {command}")
    try:
        result = execute(command, cfg)
    except AbelianError as e:
        print_error(f"{_t('error')}: {e.message}")
        stream.write(dump_json({"command": command, "error": e.to_dict()}) + "\n")
        return e.exit_code
    stream.write(render(command, result, cfg))
    return 2 if result.failed else 0
