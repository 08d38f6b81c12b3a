""" Discrete-round synchronous network simulation.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""
