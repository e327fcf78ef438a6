import configparser
from pathlib import Path

__all__ = ['read_config', 'new_config', 'parse_list']


def new_config():
    """
    Returns an empty ConfigParser that preserves key case and only accepts '='
    as a key-value delimiter (':' is used inside values, e.g.
    'position = categorical: Forward, Midfielder, Defender').

    :rtype: configparser.ConfigParser
    """
    config = configparser.ConfigParser(
        delimiters=('=',),
        comment_prefixes=('#', ';'),
        inline_comment_prefixes=('#',),
        interpolation=None,
    )
    config.optionxform = str
    return config


def read_config(filepath):
    """
    Reads a plain-text key-value configuration file.

    :param filepath: Path to the configuration file.
    :raises FileNotFoundError if filepath does not exist.
    :rtype: configparser.ConfigParser
    """
    filepath = Path(filepath)
    if not filepath.is_file():
        raise FileNotFoundError("'{}' is not a valid configuration file path.".format(filepath))
    config = new_config()
    with open(filepath, "r", encoding='utf8') as f:
        config.read_file(f)
    return config


def parse_list(value: str):
    """
    Splits a comma separated configuration value into stripped, non-empty items.

    :rtype: list
    """
    return [item.strip() for item in value.split(',') if item.strip()]
