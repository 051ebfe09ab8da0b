"""Variational equations and differential Galois groups along Painleve special solutions."""
