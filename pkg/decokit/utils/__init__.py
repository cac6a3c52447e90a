"""
Utility modules for decoherence-kit
"""

from decokit.utils.csv_output import CsvTable, read_table, write_text
from decokit.utils.validators import all_positive_finite, is_known_unit, is_positive_finite

__all__ = ["CsvTable", "read_table", "write_text", "all_positive_finite", "is_known_unit", "is_positive_finite"]
