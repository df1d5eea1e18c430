# -*- coding: utf-8 -*-

"""Top-level package for waveguide-metamaterial."""

__author__ = """S.P. Mohanty"""
__email__ = 'mohanty@aicrowd.com'
__version__ = '0.1.0'

import os  # noqa: E402

from .runner import run_scenario  # noqa F401


def getPackageDataPath():
    import waveguide_metamaterial
    return os.path.join(
                waveguide_metamaterial.__path__[0],
                "data"
            )
