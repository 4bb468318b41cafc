"""Module containing the utility functions and classes used in the tomodesign package."""
from tomodesign.utils.click_helper import (
    resolve_mask,
    resolve_prior,
    validate_float_list,
    validate_json_path,
    validate_mask,
    validate_prior,
)
from tomodesign.utils.utils import assert_file_ending, handle_issue, read_json, to_json_string, write_to_file

__all__ = [
    "assert_file_ending",
    "handle_issue",
    "read_json",
    "resolve_mask",
    "resolve_prior",
    "to_json_string",
    "validate_float_list",
    "validate_json_path",
    "validate_mask",
    "validate_prior",
    "write_to_file",
]
