""" Freezing, broadcast and recovery gadgets.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""
