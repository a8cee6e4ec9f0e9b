"""
Engine Exceptions
Obrauer - Cyclotomic Oriented Brauer Engine
"""


class ObrauerError(Exception):
    """Base class for every error raised by the engine."""

    def __init__(self, detail: str = "Engine error"):
        super().__init__(detail)
        self.detail = detail


class ParameterError(ObrauerError):
    def __init__(self, detail: str = "Invalid parameters"):
        super().__init__(detail)


class WordError(ObrauerError):
    def __init__(self, detail: str = "Malformed word"):
        super().__init__(detail)


class DiagramError(ObrauerError):
    def __init__(self, detail: str = "Malformed diagram"):
        super().__init__(detail)


class CompositionError(ObrauerError):
    def __init__(self, detail: str = "Type mismatch in composition"):
        super().__init__(detail)


class SizeLimitError(ObrauerError):
    def __init__(self, detail: str = "Size limit exceeded"):
        super().__init__(detail)


class RelationError(ObrauerError):
    def __init__(self, detail: str = "Unknown relation"):
        super().__init__(detail)


class UsageError(ObrauerError):
    def __init__(self, detail: str = "Bad command line usage"):
        super().__init__(detail)
