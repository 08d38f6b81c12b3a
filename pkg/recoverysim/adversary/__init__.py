""" Adversary strategies.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""
