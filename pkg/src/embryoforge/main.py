import argparse
import os
import sys
import traceback

import yaml

from . import __version__
from .commands import COMMAND_MODULES
from .commands.command_base import add_arguments
from .common.errors import EXIT_INPUT_ERROR, ConfigError, EmbryoForgeError
from .common.log import log
from .common.utils import import_module
from .embryoforge import EmbryoForge


def load_config(file):
    """Load configuration from a YAML file."""
    try:
        # Load the YAML file as a string
        with open(file, "r", encoding="utf8") as f:
            yaml_str = f.read()

        # Substitute the environment variables using os.environ
        yaml_str = os.path.expandvars(yaml_str)

        # Load the YAML string using yaml.safe_load
        config = yaml.safe_load(yaml_str)
    except OSError as e:
        raise ConfigError(f"Error loading configuration file {file}: {e.strerror}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"Error parsing configuration file {file}: {e}") from e

    if config is None:
        return {}
    if not isinstance(config, dict):
        raise ConfigError(f"Configuration file {file} must hold a mapping at the top level")
    return config


def merge_config(dict1, dict2):
    """Merge a new configuration into an existing configuration.

    Lists concatenate, mappings merge key by key, anything else from dict2 wins."""
    merged = {}
    for key in set(dict1.keys()).union(dict2.keys()):
        if key in dict1 and key in dict2:
            if isinstance(dict1[key], list) and isinstance(dict2[key], list):
                merged[key] = dict1[key] + dict2[key]
            elif isinstance(dict1[key], dict) and isinstance(dict2[key], dict):
                merged[key] = merge_config(dict1[key], dict2[key])
            else:
                merged[key] = dict2[key]
        elif key in dict1:
            merged[key] = dict1[key]
        else:
            merged[key] = dict2[key]
    return merged


def command_modules():
    return {name: import_module(f"embryoforge.commands.{name}") for name in COMMAND_MODULES}


def build_parser(modules=None):
    modules = modules or command_modules()
    parser = argparse.ArgumentParser(
        prog="embryoforge",
        description="Microscopy patch preprocessing, classifier training and WGAN-GP data augmentation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-c",
        "--config",
        action="append",
        default=[],
        metavar="FILE",
        help="YAML configuration file; repeat to merge several, later files win",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    for module in modules.values():
        module_info = module.info
        subparser = subparsers.add_parser(
            module_info["command"], help=module_info["description"], description=module_info["description"]
        )
        add_arguments(subparser, module_info)
    return parser


def run_command(args, modules):
    # Loop over the configuration files
    full_config = {}
    for file in args.config:
        full_config = merge_config(full_config, load_config(file))

    module = next(m for m in modules.values() if m.info["command"] == args.command)
    flags = {param["name"]: getattr(args, param["name"], None) for param in module.info["config_parameters"]}

    app = EmbryoForge(full_config)
    command_class = getattr(module, module.info["class_name"])
    try:
        return command_class(app=app, flags=flags).run()
    finally:
        app.stop()


def main(argv=None):
    modules = command_modules()
    args = build_parser(modules).parse_args(argv)
    try:
        return run_command(args, modules)
    except EmbryoForgeError as e:
        log.debug(traceback.format_exc())
        print(f"embryoforge {args.command}: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        log.debug(traceback.format_exc())
        print(f"embryoforge {args.command}: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except KeyboardInterrupt:
        print("Interrupted", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
