"""
CLI subcommands

Each module in this package registers one or more Command classes with
@register_command. Modules are discovered on import, so a new subcommand
only needs a new file here.

Example:
    from modules.commands.base import Command, CommandResult, register_command

    @register_command("classify", description="Region of (a, b, c)")
    class ClassifyCommand(Command):
        def execute(self, cfg):
            return CommandResult({"region": ...})
"""

from .base import Command, CommandRegistry, CommandResult, register_command

__all__ = [
    'Command',
    'CommandRegistry',
    'CommandResult',
    'register_command',
]


def _discover_commands():
    """Import every command module in this package"""
    import importlib
    from pathlib import Path

    commands_dir = Path(__file__).parent
    for file in sorted(commands_dir.glob("*.py")):
        if file.name.startswith("_") or file.name == "base.py":
            continue
        importlib.import_module(f".{file.stem}", package=__name__)


_discover_commands()
