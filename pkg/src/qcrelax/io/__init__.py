"""Instance files, LP-format export and CSV schemas."""
from .boxqp import boxqp_instance, dumps_boxqp, generate_boxqp, loads_boxqp, parse_boxqp, write_boxqp
from .csvio import ERROR_FIELDS, PROFILE_FIELDS, RUN_FIELDS, SGM_FIELDS, CsvSink, read_rows, write_rows
from .lpformat import IoError, export_lp_file, format_lp
from .modeljson import dumps_model, loads_model, read_model, write_model
from .native import dumps_native, loads_native, parse_native, write_native

__all__ = ["boxqp_instance", "dumps_boxqp", "generate_boxqp", "loads_boxqp", "parse_boxqp", "write_boxqp",
           "ERROR_FIELDS", "PROFILE_FIELDS", "RUN_FIELDS", "SGM_FIELDS", "CsvSink", "read_rows", "write_rows",
           "IoError", "export_lp_file", "format_lp", "dumps_native", "loads_native", "parse_native",
           "write_native", "dumps_model", "loads_model", "read_model", "write_model"]
