class BigreedyError(Exception):
    pass


class InvalidPointError(BigreedyError, ValueError):
    pass


class UnsupportedSpaceError(BigreedyError, ValueError):
    pass


class EmptyCentersError(BigreedyError, ValueError):
    pass


class EmptyClusterError(BigreedyError, ValueError):
    pass


class EmptyCandidatesError(BigreedyError, ValueError):
    pass


class BudgetExceededError(BigreedyError, RuntimeError):
    """An exhaustive enumeration would exceed its configured size limit."""

    def __init__(self, what, size, limit):
        super().__init__(f"{what}: {size} items exceeds the limit of {limit}")
        self.size = size
        self.limit = limit


class DegenerateReferenceError(BigreedyError, ValueError):
    pass


class FingerprintMismatchError(BigreedyError, ValueError):
    pass


class SelectorError(BigreedyError, RuntimeError):
    def __init__(self, round_index, cause):
        super().__init__(f"selector failed in round {round_index}: {cause}")
        self.round_index = round_index


class ParseError(BigreedyError, ValueError):
    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line
