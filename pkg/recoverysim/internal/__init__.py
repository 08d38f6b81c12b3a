""" The certifiable internal protocol.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""
