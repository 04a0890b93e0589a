"""Exception types shared across the package."""


class TreeError(ValueError):
    """Raised for structurally invalid trees or invalid tree operations."""


class NewickParseError(TreeError):
    """Raised for malformed Newick input; carries the failing position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class MatrixError(ValueError):
    """Raised for invalid dissimilarity maps or invalid map operations."""


class PhylipParseError(MatrixError):
    """Raised for malformed PHYLIP distance-matrix input."""
