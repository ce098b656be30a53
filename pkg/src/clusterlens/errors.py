"""Exception hierarchy shared by the data, training, and service layers.

Every user-facing failure mode gets its own class so the CLI can map
errors to exit codes and the HTTP layer can map them to status codes
without string matching.
"""

from __future__ import annotations


class ClusterLensError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class ParseError(ClusterLensError):
    """A CSV cell failed to parse as a finite number."""

    code = "parse_error"

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class StructuralError(ClusterLensError):
    """A CSV row has the wrong number of cells."""

    code = "structural_error"

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class EmptyInputError(ClusterLensError):
    """Input contains too few data rows to build a dataset."""

    code = "empty_input"


class NoDataError(ClusterLensError):
    """An operation needs at least one non-missing value and got none."""

    code = "no_data"


class ShapeError(ClusterLensError):
    """Array lengths or dimensions do not line up."""

    code = "shape_error"


class RangeError(ClusterLensError):
    """An index is outside its valid range."""

    code = "range_error"


class DegenerateLabelsError(ClusterLensError):
    """Training labels contain only one class."""

    code = "degenerate_labels"


class DegenerateSelectionError(ClusterLensError):
    """A selection is empty or covers every point.

    ``kind`` is "empty" or "full" so callers can distinguish the two
    without parsing the message.
    """

    code = "degenerate_selection"

    def __init__(self, message, kind):
        super().__init__(message)
        self.kind = kind


class SelectionOverlapError(ClusterLensError):
    """Two selections that must be disjoint share point ids."""

    code = "selection_overlap"

    def __init__(self, message, ids):
        super().__init__(message)
        self.ids = sorted(ids)


class AlignmentError(ClusterLensError):
    """A projection's row count does not match its dataset."""

    code = "alignment_error"


class ValidationError(ClusterLensError):
    """A value violates an invariant (non-finite coordinate, bad id, ...)."""

    code = "validation_error"


class DegenerateDataError(ClusterLensError):
    """Dataset has no usable variance or missing values where forbidden."""

    code = "degenerate_data"


class NotFoundError(ClusterLensError):
    """A referenced artifact id does not exist in the store."""

    code = "not_found"

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail
