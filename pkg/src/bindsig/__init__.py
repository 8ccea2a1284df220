"""Binding signatures with equations, their syntax, and the models that interpret them."""

from __future__ import annotations

from .models import HookModel, Model, Report, SyntacticModel, Verdict, check_model, fold
from .modules import THETA, ModuleTypeError, typecheck, evaluate, check_linearity
from .oracle import congruence_oracle
from .presentation import (
    Equation,
    Orientation,
    Regime,
    SignatureMorphism,
    TwoSignature,
    coequalizer_as_equation,
    pushout_as_algebraic,
)
from .recursion import QuotientModel, check_fold_is_morphism, check_modularity, satisfies
from .rewriting import compile_rules, joinable, normalize, rewrite_step
from .signature import AlgebraicSignature, coproduct, elementary
from .syntax import parse_term, print_term
from .terms import Con, Term, Var, con, enumerate_terms, rename, subst, var

__all__ = [
    "AlgebraicSignature", "Con", "Equation", "HookModel", "Model", "ModuleTypeError", "Orientation",
    "QuotientModel", "Regime", "Report", "SignatureMorphism", "SyntacticModel", "THETA", "Term",
    "TwoSignature", "Var", "Verdict", "check_fold_is_morphism", "check_linearity", "check_model",
    "check_modularity", "coequalizer_as_equation", "compile_rules", "con", "congruence_oracle",
    "coproduct", "elementary", "enumerate_terms", "evaluate", "fold", "joinable", "normalize",
    "parse_term", "print_term", "pushout_as_algebraic", "rename", "rewrite_step", "satisfies",
    "subst", "typecheck", "var",
]
