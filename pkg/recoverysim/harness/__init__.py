""" Scenario execution, traces, checkers and the suite.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""
