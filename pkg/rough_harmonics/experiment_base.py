"""Shared parent class for the experiments behind every CLI subcommand."""

from __future__ import annotations

import abc
import json
import logging
import os
from collections import OrderedDict
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import PurePath
from types import MappingProxyType
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple, Type, Union, cast

import click
from click.core import ParameterSource
from jsonschema import Draft4Validator, SchemaError

from rough_harmonics.cli import common_options
from rough_harmonics.configuration._dict_config import coerce_config, merge_config_sources
from rough_harmonics.exceptions import ConfigValidationError, VerificationFailed
from rough_harmonics.helpers._classproperty import classproperty
from rough_harmonics.helpers._util import read_flat_config_file
from rough_harmonics.typing import (
    IntegerType,
    Property,
    PropertiesList,
    StringType,
    extend_validator_with_defaults,
)
from rough_harmonics.writers import get_writer, resolve_output_path, write_witnesses

PACKAGE_NAME = "rough-harmonics"

JSONSchemaValidator = extend_validator_with_defaults(Draft4Validator)

OUTPUT_CONFIG = PropertiesList(
    Property(
        "format",
        StringType,
        default="csv",
        allowed_values=["csv", "json"],
        description="Output format.",
    ),
    Property("output", StringType, description="Output file; stdout when unset."),
    Property(
        "output_dir",
        StringType,
        description="Directory for '<subcommand>.<format>' when no output file is given.",
    ),
    Property(
        "n_jobs",
        IntegerType,
        default=1,
        description="joblib workers; 1 keeps reductions ordered and reproducible.",
    ),
).to_dict()


@dataclass
class ExperimentResult:
    """What an experiment produced.

    Attributes:
        rows: Table rows in column order, written as CSV.
        document: JSON document; defaults to ``{"rows": rows}`` when empty.
        passed: False when a verification inside the experiment failed.
        witnesses: Points or parameters at which checks failed.
    """

    rows: List[Dict[str, Any]] = field(default_factory=list)
    document: Dict[str, Any] = field(default_factory=dict)
    passed: bool = True
    witnesses: List[Any] = field(default_factory=list)

    def as_document(self) -> Dict[str, Any]:
        """The JSON document, falling back to the rows."""
        return self.document or {"rows": self.rows}


class ExperimentBase(metaclass=abc.ABCMeta):
    """Abstract base class for experiments."""

    name: str  # The subcommand name of the experiment.

    config_jsonschema: dict = {}
    # A JSON Schema object defining the config options that this experiment will accept.

    output_schema: dict = {}
    # A JSON Schema object describing one emitted row.

    cli_options: Tuple[Callable, ...] = ()
    # click options of the subcommand beyond the common ones.

    _config: dict

    @classproperty
    def logger(cls) -> logging.Logger:
        """Get logger.

        Returns:
            Experiment logger.
        """
        # Get the level from <EXPERIMENT_NAME>_LOGLEVEL or LOGLEVEL environment variables
        LOGLEVEL = (
            os.environ.get(f"{cls.name.upper().replace('-', '_')}_LOGLEVEL")
            or os.environ.get("LOGLEVEL")
            or "INFO"
        ).upper()

        assert (
            LOGLEVEL in logging._levelToName.values()
        ), f"Invalid LOGLEVEL configuration: {LOGLEVEL}"
        logger = logging.getLogger(cls.name)
        logger.setLevel(LOGLEVEL)
        return logger

    # Constructor

    def __init__(
        self,
        config: Optional[Union[dict, PurePath, str, List[Union[PurePath, str]]]] = None,
        validate_config: bool = True,
    ) -> None:
        """Create the experiment.

        Args:
            config: May be one or more paths, either as str or PurePath objects, or
                it can be a predetermined config dict.
            validate_config: True to require validation of config settings.

        Raises:
            ValueError: If config is not a dict or path string.
        """
        if not config:
            config_dict: Dict[str, Any] = {}
        elif isinstance(config, (str, PurePath)):
            config_dict = read_flat_config_file(config)
        elif isinstance(config, list):
            config_dict = {}
            for config_path in config:
                # Settings from files later in the list override earlier ones.
                config_dict.update(read_flat_config_file(config_path))
        elif isinstance(config, dict):
            config_dict = dict(config)
        else:
            raise ValueError(f"Error parsing config of type '{type(config).__name__}'.")
        config_jsonschema = self.full_config_jsonschema()
        self._config = coerce_config(config_dict, config_jsonschema)
        self._validate_config(raise_errors=validate_config)

    @classmethod
    def full_config_jsonschema(cls) -> dict:
        """The experiment schema with the shared output settings appended."""
        schema = json.loads(json.dumps(cls.config_jsonschema or {"properties": {}}))
        schema.setdefault("type", "object")
        schema.setdefault("properties", {})
        cls.append_builtin_config(schema)
        return schema

    @classmethod
    def append_builtin_config(cls: Type["ExperimentBase"], config_jsonschema: dict) -> None:
        """Appends the output settings to `config_jsonschema` if not already set.

        Args:
            config_jsonschema: The schema to extend in place.
        """
        for k, v in OUTPUT_CONFIG["properties"].items():
            if k not in config_jsonschema["properties"]:
                config_jsonschema["properties"][k] = v

    @classproperty
    def package_version(cls) -> str:
        """Get version.

        Returns:
            The package version number.
        """
        try:
            version = metadata.version(PACKAGE_NAME)
        except metadata.PackageNotFoundError:
            version = "[could not be detected]"
        return version

    # Core experiment config:

    @property
    def config(self) -> Mapping[str, Any]:
        """Get config.

        Returns:
            A frozen (read-only) config dictionary map.
        """
        return cast(Dict, MappingProxyType(self._config))

    def _validate_config(self, raise_errors: bool = True) -> Tuple[List[str], List[str]]:
        """Validate configuration input against the experiment configuration JSON schema.

        Every violation is collected, so one run reports all bad settings at once.

        Args:
            raise_errors: Flag to throw an exception if any validation errors are found.

        Returns:
            A tuple of configuration validation warnings and errors.

        Raises:
            ConfigValidationError: If raise_errors is True and validation fails.
        """
        warnings: List[str] = []
        errors: List[str] = []
        config_jsonschema = self.full_config_jsonschema()
        try:
            self.logger.debug("Validating config using jsonschema: %s", config_jsonschema)
            validator = JSONSchemaValidator(config_jsonschema)
            errors = [
                f"{'.'.join(str(p) for p in error.path) or '<root>'}: {error.message}"
                for error in validator.iter_errors(self._config)
            ]
        except SchemaError as ex:
            errors.append(str(ex.message))

        unknown = sorted(set(self._config) - set(config_jsonschema["properties"]))
        warnings.extend(f"Unknown setting '{key}' is ignored." for key in unknown)

        if errors:
            summary = f"Config validation failed: {'; '.join(errors)}"
            if raise_errors:
                raise ConfigValidationError(summary)
            self.logger.warning(summary)
        else:
            self.logger.debug("Config validation passed with %d warnings.", len(warnings))
        for warning in warnings:
            self.logger.warning(warning)
        return warnings, errors

    # Abstract methods:

    @abc.abstractmethod
    def run(self) -> ExperimentResult:
        """Run the experiment.

        Raises:
            NotImplementedError: If the derived experiment doesn't override this method.
        """
        raise NotImplementedError()

    # Metadata:

    @classmethod
    def print_version(
        cls: Type["ExperimentBase"],
        print_fn: Callable[[Any], None] = print,
    ) -> None:
        """Print the package version.

        Args:
            print_fn: A function to use to display the version.
        """
        print_fn(f"{PACKAGE_NAME} v{cls.package_version}")

    @classmethod
    def _get_about_info(cls: Type["ExperimentBase"]) -> Dict[str, Any]:
        """Returns the experiment metadata.

        Returns:
            A dictionary containing the relevant 'about' information.
        """
        info: Dict[str, Any] = OrderedDict({})
        info["name"] = cls.name
        info["description"] = (cls.__doc__ or "").strip()
        info["version"] = cls.package_version
        info["settings"] = cls.full_config_jsonschema()
        info["output"] = cls.output_schema
        return info

    @classmethod
    def about_markdown(cls: Type["ExperimentBase"]) -> str:
        """Render the settings as a markdown table."""
        info = cls._get_about_info()
        properties = info["settings"].get("properties", {})
        width = max((len(k) for k in properties), default=7)
        required = info["settings"].get("required", [])
        lines = [
            f"## `{info['name']}`\n",
            f"{info['description']}\n",
            f"| {'Setting':{width}} | Required | Default | Description |",
            f"|:{'-' * width}-|:--------:|:-------:|:------------|",
        ]
        for k, v in properties.items():
            description = v.get("description", "").replace("\n", "<BR/>")
            lines.append(
                f"| {k:{width}} | {'True' if k in required else 'False':8} | "
                f"{str(v.get('default', 'None')):7} | {description} |"
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def print_about(cls: Type["ExperimentBase"], format: Optional[str] = None) -> None:
        """Print the settings and output columns.

        Args:
            format: Render option for the experiment information.
        """
        info = cls._get_about_info()

        if format == "json":
            click.echo(json.dumps(info, indent=2, default=str))
        elif format == "markdown":
            click.echo(cls.about_markdown())
        else:
            formatted = "\n".join([f"{k.title()}: {v}" for k, v in info.items()])
            click.echo(formatted)

    # Output:

    def write_result(self, result: ExperimentResult) -> None:
        """Write the result to the configured file, output directory or standard out.

        Raises:
            OSError: If the output path cannot be written.
        """
        format_name = self.config["format"]
        path = resolve_output_path(
            self.name, format_name, self.config.get("output"), self.config.get("output_dir")
        )
        writer = get_writer(format_name)
        if path is None:
            click.echo(writer.render(result), nl=False)
        else:
            writer.write_path(result, path)
        if not result.passed:
            write_witnesses(result.witnesses, path, click.get_text_stream("stderr"))

    # Command Line Execution

    @classproperty
    def cli(cls) -> click.Command:
        """Build the click subcommand of this experiment.

        Only flags given explicitly override config files; unset flags leave the file
        value or schema default in place.

        Returns:
            A click command named after the experiment.
        """

        @click.pass_context
        def cli(ctx: click.Context, **flags: Any) -> None:
            """Handle command line execution.

            Args:
                ctx: The click context.
                flags: Parsed option values keyed by setting name.

            Raises:
                VerificationFailed: If a verification inside the experiment failed.
            """
            if flags.pop("version"):
                cls.print_version(print_fn=click.echo)
                return
            if flags.pop("about"):
                cls.print_about(format=flags.get("format"))
                return

            config_paths = flags.pop("config")
            overrides = {
                key: value
                for key, value in flags.items()
                if ctx.get_parameter_source(key) is not ParameterSource.DEFAULT
            }
            config = merge_config_sources(
                ["ENV", *config_paths], cls.full_config_jsonschema(), overrides=overrides
            )
            experiment = cls(config=config)
            cls.print_version(print_fn=cls.logger.info)
            result = experiment.run()
            experiment.write_result(result)
            if not result.passed:
                raise VerificationFailed(f"{cls.name}: verification failed.", result)

        command: Callable = cli
        for option in reversed((*common_options.COMMON_OPTIONS, *cls.cli_options)):
            command = option(command)
        return click.command(
            name=cls.name,
            help=(cls.__doc__ or "").strip(),
            context_settings={"help_option_names": ["--help"]},
        )(command)
