"""Computation modules of the Abelian integral toolkit"""
