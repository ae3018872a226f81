"""Exception hierarchy shared by every module of the package."""


class RareclassError(Exception):
    """Base class for all errors raised by rareclass."""


class SchemaError(RareclassError):
    pass


class ParseError(RareclassError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class LabelError(RareclassError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class StructureError(RareclassError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class WriteError(RareclassError):
    pass


class EmptyMinorityError(RareclassError):
    pass


class CalibrationError(RareclassError):
    pass


class FeatureMismatchError(RareclassError):
    def __init__(self, message, feature=None):
        super().__init__(message)
        self.feature = feature


class SingularMatrixError(RareclassError):
    pass


class EmptyNodeError(RareclassError):
    pass


class DatasetMismatchError(RareclassError):
    pass


class InputError(RareclassError):
    pass


class DegenerateLabelsError(RareclassError):
    pass


class DegenerateSampleError(RareclassError):
    def __init__(self, message, label=None):
        super().__init__(message)
        self.label = label


class UndefinedTauError(RareclassError):
    pass


class DomainError(RareclassError):
    pass
