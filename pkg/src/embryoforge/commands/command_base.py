"""Base class for the subcommands.

A command module declares an ``info`` dictionary in the same shape as a flow
component: ``class_name``, ``description`` and ``config_parameters``. Every
parameter value is resolved with the precedence

    info default < top level of the config files < commands.<section> < flag

and the resolved values are what the command runs with and what it writes to
``resolved_config.yaml`` next to its outputs."""

import argparse
import copy
import os
from abc import abstractmethod

import yaml

from ..common.errors import ConfigError
from ..common.log import log
from ..common.params import coerce_parameter
from ..common.utils import ensure_directory
from ..gan.config import TrainConfig
from ..models.layers import NetworkConfig

RESOLVED_CONFIG_FILE = "resolved_config.yaml"
PASSED_THROUGH_KEYS = ("log", "storage")


class CommandBase:
    def __init__(self, module_info, app=None, config=None, flags=None):
        self.module_info = module_info
        self.app = app
        self.config = config if config is not None else (app.config if app else {})
        self.flags = {key: value for key, value in (flags or {}).items() if value is not None}
        self.section_name = module_info["section"]
        self.section = (self.config.get("commands") or {}).get(self.section_name) or {}
        self.log_identifier = f"[embryoforge.{self.section_name}] "
        self.command_config = {}
        # Names whose value came from a file or a flag rather than an info default
        self.explicit = set()
        self.resolve_config()
        self.validate_config()

    def parameters(self):
        return self.module_info.get("config_parameters", [])

    def resolve_config(self):
        for param in self.parameters():
            name = param.get("name", None)
            if name is None:
                raise ValueError(
                    f"config_parameters schema for command {self.section_name} does not have a name: {param}"
                )
            if name in self.flags:
                value = self.flags[name]
            elif name in self.section:
                value = self.section[name]
            elif name in self.config and not isinstance(self.config[name], dict):
                value = self.config[name]
            else:
                self.command_config[name] = copy.deepcopy(param.get("default"))
                continue
            self.explicit.add(name)
            self.command_config[name] = coerce_parameter(param, value)

        known = {param["name"] for param in self.parameters()}
        unknown = sorted(set(self.section) - known)
        if unknown:
            raise ConfigError(
                f"Unknown parameters in commands.{self.section_name}: {', '.join(unknown)}"
            )

    def validate_config(self):
        for param in self.parameters():
            if param.get("required", False) and self.command_config.get(param["name"]) is None:
                flag = param.get("flag", "--" + param["name"].replace("_", "-"))
                raise ConfigError(
                    f"Config parameter {param['name']} is required by {self.section_name} "
                    f"(set commands.{self.section_name}.{param['name']} or pass {flag})"
                )

    def get_config(self, key=None, default=None):
        val = self.command_config.get(key, None)
        if val is None:
            val = self.config.get(key, default)
        return val

    def set_config(self, key, value):
        self.command_config[key] = value

    def train_config(self, **overrides):
        """TrainConfig from the resolved parameters that it knows about"""
        data = {key: value for key, value in self.command_config.items() if value is not None}
        data.update(overrides)
        return TrainConfig.from_dict(data)

    def network_config(self, input_size, **overrides):
        data = {key: value for key, value in self.command_config.items() if value is not None}
        data.update(overrides, input_size=int(input_size))
        try:
            return NetworkConfig.from_dict(data)
        except ValueError as e:
            raise ConfigError(f"Invalid network configuration: {e}") from e

    def resolved_config(self):
        """A config document that reproduces this run when passed back with -c"""
        resolved = {key: copy.deepcopy(self.config[key]) for key in PASSED_THROUGH_KEYS if key in self.config}
        resolved["commands"] = {self.section_name: copy.deepcopy(self.command_config)}
        return resolved

    def write_resolved_config(self, out_dir):
        ensure_directory(out_dir)
        path = os.path.join(out_dir, RESOLVED_CONFIG_FILE)
        with open(path, "w", encoding="utf-8") as file:
            yaml.safe_dump(self.resolved_config(), file, sort_keys=True, default_flow_style=False)
        log.debug("%sWrote %s", self.log_identifier, path)
        return path

    @abstractmethod
    def run(self):
        """Execute the command and return the process exit code"""


def add_arguments(parser, module_info):
    """Generate one command-line flag per config parameter.

    Flags default to None so that an absent flag never overrides a file value."""
    for param in module_info.get("config_parameters", []):
        name = param["name"]
        flag = param.get("flag", "--" + name.replace("_", "-"))
        help_text = param.get("description", "")
        if param.get("default") is not None:
            help_text = f"{help_text} (default: {param['default']})"
        kind = param.get("type", "string")
        kwargs = {"dest": name, "default": None, "help": help_text}
        if kind == "bool":
            kwargs["action"] = argparse.BooleanOptionalAction
        elif kind == "float_list":
            kwargs["nargs"] = "+"
            kwargs["type"] = float
        else:
            kwargs["type"] = {"int": int, "float": float}.get(kind, str)
            if param.get("choices"):
                kwargs["choices"] = param["choices"]
        parser.add_argument(flag, **kwargs)
