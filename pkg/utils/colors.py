"""Terminal colors and print utilities

Diagnostics go to standard error so that standard output carries only the
JSON/CSV artifact of a run.
"""

import sys


class Colors:
    """Terminal colors"""
    HEADER = '\033[95m'
    OKBLUE = '\033[94m'
    OKCYAN = '\033[96m'
    OKGREEN = '\033[92m'
    WARNING = '\033[93m'
    FAIL = '\033[91m'
    ENDC = '\033[0m'
    BOLD = '\033[1m'

    enabled = sys.stderr.isatty()

    @classmethod
    def wrap(cls, text: str, *codes: str) -> str:
        """Colorize text when stderr is a terminal"""
        if not cls.enabled:
            return text
        return f"{''.join(codes)}{text}{cls.ENDC}"


def _emit(text: str):
    print(text, file=sys.stderr)


def print_header(text: str):
    """Print header"""
    rule = Colors.wrap('=' * 60, Colors.HEADER, Colors.BOLD)
    _emit(f"\n{rule}")
    _emit(Colors.wrap(f"{text:^60}", Colors.HEADER, Colors.BOLD))
    _emit(f"{rule}\n")


def print_section(text: str):
    """Print section"""
    _emit("\n" + Colors.wrap(f">>> {text}", Colors.OKCYAN, Colors.BOLD))


def print_info(text: str):
    """Print info"""
    _emit(Colors.wrap(f"ℹ {text}", Colors.OKBLUE))


def print_success(text: str):
    """Print success message"""
    _emit(Colors.wrap(f"✓ {text}", Colors.OKGREEN))


def print_warning(text: str):
    """Print warning"""
    _emit(Colors.wrap(f"⚠ {text}", Colors.WARNING))


def print_error(text: str):
    """Print error"""
    _emit(Colors.wrap(f"✗ {text}", Colors.FAIL))
