#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Command-line interface for pulsemetro
"""

from airtight.cli import configure_commandline
import logging
from rich.console import Console
import sys
from pulsemetro.config import ConfigError, ConfigParser, parse_config
from pulsemetro.interpreter import EXIT_CONFIG, Interpreter


logger = logging.getLogger(__name__)

DEFAULT_LOG_LEVEL = logging.WARNING
OPTIONAL_ARGUMENTS = [
    [
        "-l",
        "--loglevel",
        "NOTSET",
        "desired logging level ("
        + "case-insensitive string: DEBUG, INFO, WARNING, or ERROR",
        False,
    ],
    ["-v", "--verbose", False, "verbose output (logging level == INFO)", False],
    [
        "-w",
        "--veryverbose",
        False,
        "very verbose output (logging level == DEBUG)",
        False,
    ],
    ["-c", "--config", "", "path to a key = value configuration file", False],
    ["-i", "--input", "", "qfi CSV file read by the fit command", False],
]
# one string flag per configuration key; an empty string means "not given"
OPTIONAL_ARGUMENTS.extend(
    [
        [f"--{key}", f"--{key.replace('_', '-')}", "", f"override configuration key {key}", False]
        if "_" in key
        else [f"--{key}", f"--{key}-value", "", f"override configuration key {key}", False]
        for key in ConfigParser.KEYS
    ]
)
POSITIONAL_ARGUMENTS = [
    # each row is a list with 3 elements: name, type, help
    [
        "command",
        str,
        "subcommand: validate, evolve, qfi, squeeze, wigner, fit, sweep, oracle or help",
    ],
]


def main(**kwargs):
    """
    main function
    """
    c = Console(record=True)
    overrides = {k: kwargs[k] for k in ConfigParser.KEYS if kwargs.get(k)}
    try:
        config = parse_config(kwargs["config"] or None, overrides)
    except ConfigError as err:
        c.print(f"ERROR: {str(err)}", style="bold red", markup=False)
        sys.exit(EXIT_CONFIG)
    command = kwargs["command"]
    args = [kwargs["input"]] if kwargs["input"] else list()
    status, written = Interpreter(console=c).run(command, config, args)
    for filepath in written:
        logger.info(f"output: {filepath}")
    sys.exit(status)


if __name__ == "__main__":
    main(
        **configure_commandline(
            OPTIONAL_ARGUMENTS, POSITIONAL_ARGUMENTS, DEFAULT_LOG_LEVEL
        )
    )
