"""
File:           config_reader.py
Author:         Dibyaranjan Sathua
Created on:     16/04/22, 6:31 pm
"""
from typing import Dict, ItemsView
import json
from pathlib import Path

from src.lipschitz.exception import ConfigFileError
from src.utils.logger import LogFacade


logger: LogFacade = LogFacade.get_logger("config")


class ConfigReader:
    """ Reads an experiment config file, either JSON or flat `key = value` text """

    def __init__(self, config_file_path: Path):
        self._config_file_path = Path(config_file_path)
        if not self._config_file_path.is_file():
            raise ConfigFileError(f"Config file {self._config_file_path} doesn't exist")
        text = self._config_file_path.read_text()
        if self._config_file_path.suffix.lower() == ".json":
            try:
                self._config: Dict = json.loads(text)
            except json.JSONDecodeError as err:
                logger.error(f"Error decoding config file {self._config_file_path}")
                raise ConfigFileError(str(err)) from err
            if not isinstance(self._config, dict):
                raise ConfigFileError("JSON config must be an object of key/value pairs")
        else:
            self._config = self.parse_flat(text)

    @staticmethod
    def parse_flat(text: str) -> Dict[str, str]:
        """ `key = value` per line, `#` starts a comment, later keys win """
        config = dict()
        for number, raw_line in enumerate(text.splitlines(), start=1):
            line = raw_line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigFileError(f"Line {number}: expected `key = value`, got {raw_line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ConfigFileError(f"Line {number}: empty key")
            config[key.replace("-", "_")] = value
        return config

    def __getitem__(self, item: str):
        return self._config[item]

    def __setitem__(self, key, value):
        self._config[key] = value

    def __contains__(self, item: str):
        return item in self._config

    def get(self, item: str, default=None):
        return self._config.get(item, default)

    def items(self) -> ItemsView:
        return self._config.items()

    def as_dict(self) -> Dict:
        return dict(self._config)
