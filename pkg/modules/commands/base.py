"""
Command base class and registry for the CLI subcommands

Each subcommand is a Command subclass registered with @register_command.
It names the RunConfig fields it reads as flags and turns a validated
RunConfig into a CommandResult. Commands print diagnostics through the
utils print helpers; the artifact itself is assembled by the runner.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple, Type

from modules.abelian_engine import PerturbationPoly
from modules.charts import chart_from_perturbation
from modules.hamiltonian_family import (
    STANDARD, SWAPPED, HamiltonianParams, PeriodAnnulus, annuli, annulus_for, find_annulus,
)
from utils import print_info
from utils.errors import ConfigError
from utils.io import RunConfig, load_perturbation
from i18n import get_translator

PARAM_OPTIONS = ("a", "b", "c", "swapped", "classify_tol")

# RunConfig fields whose long flag is not the field name
_FLAGS = {"h": "--level"}


@dataclass
class CommandResult:
    """JSON payload, optional CSV text, and whether a numerical check failed"""
    payload: Dict[str, Any]
    csv: Optional[str] = None
    failed: bool = False
    flags: List[str] = field(default_factory=list)


class Command(ABC):
    """
    Base class for CLI subcommands

    Each command must implement:
    - name: subcommand name as typed on the command line
    - execute(): the work, returning a CommandResult
    """

    name: str = ""
    description: str = ""
    schema: str = ""
    options: Tuple[str, ...] = ()

    @abstractmethod
    def execute(self, cfg: RunConfig) -> CommandResult:
        """
        Run the command

        Args:
            cfg: Validated run configuration
        """
        pass

    @property
    def help_text(self) -> str:
        return f"{self.description}\n\nOutput: {self.schema}" if self.schema else self.description

    # Shared helpers -------------------------------------------------------

    @staticmethod
    def params_of(cfg: RunConfig) -> HamiltonianParams:
        return HamiltonianParams(a=cfg.a, b=cfg.b, c=cfg.c, chart=SWAPPED if cfg.swapped else STANDARD)

    def require(self, cfg: RunConfig, name: str):
        value = getattr(cfg, name)
        if value is None:
            _t = get_translator()
            option = _FLAGS.get(name, "--" + name.replace("_", "-"))
            raise ConfigError(_t('missing_option', option=option, command=self.name),
                              {"option": option, "command": self.name})
        return value

    def perturbation_of(self, cfg: RunConfig) -> PerturbationPoly:
        path = self.require(cfg, "pert")
        pert = chart_from_perturbation(load_perturbation(path))
        print_info(get_translator()('perturbation_loaded', path=path, n=pert.n))
        return pert

    @staticmethod
    def annuli_of(params: HamiltonianParams, cfg: RunConfig) -> List[PeriodAnnulus]:
        """The selected annulus, the one holding cfg.h, or all of them"""
        if cfg.annulus is not None:
            return [find_annulus(params, cfg.annulus)]
        if cfg.h is not None:
            return [annulus_for(params, cfg.h)]
        return annuli(params)

    def annulus_of(self, params: HamiltonianParams, cfg: RunConfig) -> PeriodAnnulus:
        h = self.require(cfg, "h")
        if cfg.annulus is not None:
            return find_annulus(params, cfg.annulus)
        return annulus_for(params, h)


class CommandRegistry:
    """Central registry of subcommands, in registration order"""

    _commands: Dict[str, Type[Command]] = {}

    @classmethod
    def register(cls, command_class: Type[Command]) -> None:
        cls._commands[command_class.name] = command_class

    @classmethod
    def get(cls, name: str) -> Optional[Command]:
        command_class = cls._commands.get(name)
        return command_class() if command_class else None

    @classmethod
    def names(cls) -> List[str]:
        return list(cls._commands)

    @classmethod
    def all(cls) -> List[Command]:
        return [command_class() for command_class in cls._commands.values()]


def register_command(name: str, description: str = "", schema: str = "",
                     options: Tuple[str, ...] = ()) -> Callable[[Type[Command]], Type[Command]]:
    """
    Decorator to register a subcommand

    Example:
        @register_command("classify", options=PARAM_OPTIONS)
        class ClassifyCommand(Command):
            def execute(self, cfg):
                ...
    """
    def decorator(cls: Type[Command]) -> Type[Command]:
        cls.name = name
        if description:
            cls.description = description
        if schema:
            cls.schema = schema
        cls.options = tuple(options)
        CommandRegistry.register(cls)
        return cls

    return decorator
