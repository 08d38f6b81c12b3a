""" Root module for the recoverysim tool.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

VERSION_STRING = '0.1.0'
