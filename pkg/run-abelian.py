#!/usr/bin/env python3
"""
Abelian integral toolkit
Command-line entry point

Subcommands by concern:
1. Family - classify, critical, annuli
2. Orbits - trace, abelian, reduce
3. Picard–Fuchs - pf-verify, riccati-verify
4. Melnikov - melnikov, zeros
5. The (-1, -2, 1) family - hopf, homoclinic-constants, homoclinic-design, distributions
"""

import sys

from i18n import set_language, get_translator
from runner import build_parser, config_from_args, run
from utils import print_error, print_warning
from utils.errors import AbelianError
from utils.io import dump_json


def main():
    """Main function"""
    parser = build_parser()
    args = parser.parse_args()

    set_language(args.lang)
    _t = get_translator()

    if not args.command:
        parser.print_help()
        sys.exit(1)

    try:
        cfg = config_from_args(args)
        code = run(args.command, cfg)
    except AbelianError as e:
        print_error(f"{_t('error')}: {e.message}")
        print(dump_json({"command": args.command, "error": e.to_dict()}))
        sys.exit(e.exit_code)
    except KeyboardInterrupt:
        print_warning(_t('user_interrupted'))
        sys.exit(130)
    sys.exit(code)


if __name__ == "__main__":
    main()
