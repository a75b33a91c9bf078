from typing import Optional


class ProcHouseError(Exception):
    """Base error for the house generator"""


class ParseError(ProcHouseError):
    """Input file is not well-formed JSON"""

    def __init__(self, path: str, detail: str, line: Optional[int] = None, column: Optional[int] = None):
        self.path = path
        self.line = line
        self.column = column
        where = f"{path}:{line}:{column}" if line is not None else path
        super().__init__(f"Cannot parse {where}: {detail}")


class SchemaError(ProcHouseError):
    """Input parsed but violates the schema or an invariant"""

    def __init__(self, detail: str, record: Optional[str] = None, location: Optional[str] = None):
        self.record = record
        self.location = location
        parts = [detail]
        if record is not None:
            parts.append(f"record={record}")
        if location:
            parts.append(f"at={location}")
        super().__init__(" ".join(parts))


class EmptyRegistry(ProcHouseError):
    pass


class SubdivisionFailure(ProcHouseError):
    pass


class ConnectivityInfeasible(ProcHouseError):
    pass


class PlacementExhausted(ProcHouseError):
    pass


class RejectionExhausted(ProcHouseError):
    pass


class NoFreeCell(ProcHouseError):
    pass


class NoReachableTarget(ProcHouseError):
    pass


class GenerationFailure(ProcHouseError):
    """Retry budget for a house was exhausted"""

    def __init__(self, detail: str, attempts: int):
        self.attempts = attempts
        super().__init__(f"{detail} (after {attempts} attempts)")


# Stage failures that trigger a resample of the whole house
RESAMPLE_ERRORS = (SubdivisionFailure, ConnectivityInfeasible, PlacementExhausted, NoFreeCell)
