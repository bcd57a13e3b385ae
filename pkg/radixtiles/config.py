"""Methods for handling the configuration file."""
import configparser
import logging
import os
from configparser import RawConfigParser
from typing import Optional, Union

from radixtiles import defaults
from radixtiles.constants import DATABASE, ENV_POINT_CAP, LIMITS, SAMPLING

logger = logging.getLogger(__name__)


def set_configuration(
    point_cap: Optional[int] = None,
    dk_cap: Optional[int] = None,
    max_steps: Optional[int] = None,
    samples: Optional[int] = None,
    depth: Optional[int] = None,
    seed: Optional[int] = None,
    sqlalchemy_connection_string: Optional[str] = None,
) -> dict:
    """Set configuration values in the config file."""
    limits = {"point_cap": point_cap, "dk_cap": dk_cap, "max_steps": max_steps}
    for param, value in limits.items():
        write_to_config(LIMITS, param, value)

    sampling = {"samples": samples, "depth": depth, "seed": seed}
    for param, value in sampling.items():
        write_to_config(SAMPLING, param, value)

    if sqlalchemy_connection_string:
        write_to_config(DATABASE, "sqlalchemy_connection_string", sqlalchemy_connection_string)

    return get_config_as_dict()


def write_to_config(section: str, option: str, value: Union[str, int, None]) -> None:
    """Write section, option and value to config file.

    Parameters
    ----------
    section : str
        Section name of configuration file.
    option : str
        Option name.
    value : str or int
        Option value. Nothing is written for None.
    """
    if value is None or value == "":
        return

    cfp = defaults.config_file_path
    config = RawConfigParser()

    if os.path.exists(cfp):
        config.read(cfp)

    if not config.has_section(section):
        config.add_section(section)
    config.set(section, option, str(value))

    with open(cfp, "w") as config_file:
        config.write(config_file)
    logger.info(f"Set in configuration file {cfp} in section {section} {option}={value}")


def get_config_as_dict() -> dict:
    """Get radixtiles configuration as dictionary, empty if no config file exists."""
    cfp = defaults.config_file_path
    if not os.path.exists(cfp):
        return {}

    config = RawConfigParser()
    config.read(cfp)
    return {section: dict(config.items(section)) for section in config.sections()}


def get_config_value(section: str, option: str, value=None) -> Optional[str]:
    """Retrieve value from a given section and option from the config file if it exists.

    Parameters
    ----------
    section (str): Configuration section header
    option (str): Option value within the section
    value (str): (optional) fallback returned if the option doesn't exist

    Returns
    -------
    config_value: The value of the specified section and option
    """
    cfg = configparser.ConfigParser()

    if os.path.isfile(defaults.config_file_path):
        cfg.read(defaults.config_file_path)

        if cfg.has_section(section) and cfg.has_option(section=section, option=option):
            return cfg[section][option]

    return None if value is None else str(value)


def _get_int(section: str, option: str, default: int) -> int:
    raw = get_config_value(section, option)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {section}.{option}={raw!r} in {defaults.config_file_path}")
        return default


def get_point_cap(override: Optional[int] = None) -> int:
    """Return the absorbing-ball lattice-point cap.

    Precedence: explicit override > environment variable > config file > default.
    """
    if override is not None:
        return int(override)

    env_value = os.environ.get(ENV_POINT_CAP)
    if env_value:
        try:
            return int(env_value)
        except ValueError:
            logger.warning(f"Ignoring non-integer {ENV_POINT_CAP}={env_value!r}")

    return _get_int(LIMITS, "point_cap", defaults.DEFAULT_POINT_CAP)


def get_dk_cap() -> int:
    """Return the cap on q**k digit strings."""
    return _get_int(LIMITS, "dk_cap", defaults.DEFAULT_DK_CAP)


def get_max_steps() -> int:
    """Return the digit-step budget of a single expansion."""
    return _get_int(LIMITS, "max_steps", defaults.DEFAULT_MAX_STEPS)


def get_sampling_defaults() -> dict:
    """Return the sampling defaults (samples, depth, seed) after applying the config file."""
    return {
        "samples": _get_int(SAMPLING, "samples", defaults.DEFAULT_SAMPLES),
        "depth": _get_int(SAMPLING, "depth", defaults.DEFAULT_DEPTH),
        "seed": _get_int(SAMPLING, "seed", defaults.DEFAULT_SEED),
    }


def get_connection_string() -> str:
    """Get the sqlalchemy connection string from config file, falls back to the default SQLite file."""
    return get_config_value(DATABASE, "sqlalchemy_connection_string", defaults.CONN_STR_DEFAULT)
