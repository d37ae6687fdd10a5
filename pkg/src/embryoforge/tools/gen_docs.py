"""Write markdown reference pages from the ``info`` dictionaries of the
subcommands and the preprocessing components"""

import os
import pkgutil
import sys

from ..commands import COMMAND_MODULES
from ..common.utils import ensure_directory, import_module

COMPONENT_PACKAGE = "embryoforge.components.preprocess"


def command_infos():
    for name in COMMAND_MODULES:
        yield name, import_module(f"embryoforge.commands.{name}").info


def component_infos():
    package = import_module(COMPONENT_PACKAGE)
    for module in pkgutil.iter_modules(package.__path__):
        info = getattr(import_module(f"{COMPONENT_PACKAGE}.{module.name}"), "info", None)
        if info is not None:
            yield module.name, info


def parameter_table(params):
    if not params:
        return "No configuration parameters\n\n"
    markdown = "| Parameter | Type | Required | Default | Description |\n"
    markdown += "| --- | --- | --- | --- | --- |\n"
    for param in params:
        default = param.get("default")
        markdown += (
            f"| {param['name']} | {param.get('type', 'string')} | {param.get('required', False)} "
            f"| {'' if default is None else default} | {param.get('description', '')} |\n"
        )
    return markdown + "\n"


def format_json_schema(schema, level=0):
    indent = "  " * level
    if not schema or "type" not in schema:
        return f"{indent}<any>"
    if schema["type"] == "object":
        lines = [f"{indent}{{"]
        for prop_name, prop_data in schema.get("properties", {}).items():
            lines.append(f"{indent}  {prop_name}: {format_json_schema(prop_data, level + 1).strip()}")
        if not schema.get("properties"):
            lines.append(f"{indent}  <freeform-object>")
        lines.append(f"{indent}}}")
        return "\n".join(lines)
    if schema["type"] == "array":
        return f"{indent}[{format_json_schema(schema.get('items'), level + 1).strip()}, ...]"
    return f"{indent}<{schema['type']}>"


def command_markdown(name, info):
    markdown = f"# embryoforge {info['command']}\n\n{info['description']}\n\n"
    markdown += "## Configuration Parameters\n\n"
    markdown += "Set them under `commands." + info["section"] + "` in a config file or pass them as flags.\n\n"
    markdown += "```yaml\ncommands:\n  " + info["section"] + ":\n"
    for param in info["config_parameters"]:
        markdown += f"    {param['name']}: <{param.get('type', 'string')}>\n"
    markdown += "```\n\n"
    markdown += parameter_table(info["config_parameters"])
    return markdown


def component_markdown(name, info):
    markdown = f"# {info['class_name']}\n\n{info['description']}\n\n"
    markdown += "## Configuration Parameters\n\n```yaml\n"
    markdown += f"component_name: <user-supplied-name>\ncomponent_module: {name}\ncomponent_config:\n"
    for param in info.get("config_parameters", []):
        markdown += f"  {param['name']}: <{param.get('type', 'string')}>\n"
    markdown += "```\n\n"
    markdown += parameter_table(info.get("config_parameters", []))
    for title, key in (("Component Input Schema", "input_schema"), ("Component Output Schema", "output_schema")):
        if key in info:
            markdown += f"## {title}\n\n```\n{format_json_schema(info[key])}\n```\n\n"
    return markdown


def create_markdown_documentation(entries, render, output_dir, title):
    ensure_directory(output_dir)
    index = [f"# {title}\n\n", "| Name | Description |\n", "| --- | --- |\n"]
    written = []
    for name, info in sorted(entries):
        path = os.path.join(output_dir, f"{name}.md")
        with open(path, "w", encoding="utf-8") as f:
            f.write(render(name, info))
        written.append(path)
        description = info.get("short_description", info["description"]).split(". ")[0]
        index.append(f"| [{name}]({name}.md) | {description} |\n")
    with open(os.path.join(output_dir, "index.md"), "w", encoding="utf-8") as f:
        f.write("".join(index))
    return written


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    docs_dir = argv[0] if argv else "docs"
    create_markdown_documentation(
        command_infos(), command_markdown, os.path.join(docs_dir, "commands"), "Subcommands"
    )
    create_markdown_documentation(
        component_infos(), component_markdown, os.path.join(docs_dir, "components"), "Preprocessing components"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
