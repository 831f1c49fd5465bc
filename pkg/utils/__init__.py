"""Utility modules for the Abelian integral toolkit"""

from .colors import Colors, print_header, print_section, print_info, print_success, print_warning, print_error
from .errors import AbelianError, ClassificationConflict, ConfigError, DomainError, NumericalFailure

__all__ = [
    'Colors',
    'print_header',
    'print_section',
    'print_info',
    'print_success',
    'print_warning',
    'print_error',
    'AbelianError',
    'ClassificationConflict',
    'ConfigError',
    'DomainError',
    'NumericalFailure',
]
