"""Hilbert symbols, quaternion ramification, Darmon sets and definability budgets over number fields."""

from .darmon import DarmonQuery, ProjectivePoint, darmon_member, in_darmon, is_darmon_point, rational_power_oracle
from .definable_sets import in_J, in_J4, in_J42, in_Ksf, in_S_oracle, in_T, in_T_oracle
from .formula_compiler import (
    assemble_empty,
    assemble_main,
    budget_ledger,
    combine_conjunction,
    rewrite_existsforall_or_exists,
    rewrite_universal_or_exists,
    template,
)
from .localsymbols import delta, delta_upper, hilbert, omega, reciprocity_check
from .numberfield import (
    FieldElement,
    NumberField,
    PrimeIdeal,
    SearchExhausted,
    UnsupportedField,
    parse_element,
    parse_field,
)
from .prescribe import Unsatisfiable, prescribe_symbols, realize_finite, realize_with_real

__version__ = "0.1.0"
