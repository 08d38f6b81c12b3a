""" Ledger algebra, party identities and simulated signatures.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""
