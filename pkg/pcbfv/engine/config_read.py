#!/usr/bin/env python3

"""
ConfigRead

Read configuration file and return parameter values on demand.

Copyright 2026 by Michael R. McPherson, Charlottesville, VA
mailto:mcpherson@acm.org
http://www.kq9p.us

This program is free software; you can redistribute it and/or modify it under
the terms of the GNU General Public License as published by the Free
Software Foundation; either version 3 of the License, or (at your option) any
later version.

This program is distributed in the hope that it will be useful, but WITHOUT ANY
WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A
PARTICULAR PURPOSE.  See the GNU General Public License for more
details.

You should have received a copy of the GNU General Public License along with
this program. If not, see <http://www.gnu.org/licenses/>.
"""

__author__ = 'Michael R. McPherson <mcpherson@acm.org>'

import os
import configparser

from engine.errors import ConfigError


class ConfigRead:
    """Read configuration file and return parameter values on demand.

    Attributes
    ----------
    config : configparser.ConfigParser
        Parsed contents of every configuration file found.

    Methods
    -------
    open_config(configfile_path, configfile_name)
        Search paths in array configfile_path for configfile_name, open, and import
    get_param(param_group, param_name, param_type, default=None)
        Return value of "param_name" converted to "param_type"
    has_param(param_group, param_name)
        True if the parameter is present in the configuration

    """

    def __init__(self):
        self.config = configparser.ConfigParser()

    def open_config(self, configfile_path, configfile_name):
        config_file_found = False
        for path in configfile_path:
            config_file = os.path.join(path, configfile_name)
            if os.path.isfile(config_file):
                self.config.read(config_file)
                config_file_found = True
        return config_file_found

    def read_string(self, text):
        self.config.read_string(text)

    def has_param(self, param_group, param_name):
        return self.config.has_option(param_group, param_name)

    def get_param(self, param_group, param_name, param_type, default=None):
        if not self.has_param(param_group, param_name):
            if default is not None:
                return default
            raise ConfigError('Missing parameter [{}] {}'.format(param_group, param_name))
        raw = self.config[param_group][param_name]
        try:
            if param_type == "int":
                return int(raw)
            elif param_type == "float":
                return float(raw)
            elif param_type == "bool":
                return self.config[param_group].getboolean(param_name)
            elif param_type == "path":
                return os.path.expandvars(raw)
            elif param_type == "string":
                return raw
        except ValueError as err:
            raise ConfigError('Bad value for [{}] {}: {}'.format(param_group, param_name, err))
        raise ConfigError('Unknown param_type {}'.format(param_type))
