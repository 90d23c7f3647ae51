"""Exception hierarchy for rsdlab."""


class RsdLabError(Exception):
    """Base class for every error raised by the package."""


class InstanceError(RsdLabError, ValueError):
    """A market instance failed validation."""


class DuplicateSchoolInList(InstanceError):
    pass


class SchoolIndexOutOfRange(InstanceError):
    pass


class ZeroCapacity(InstanceError):
    pass


class MoreSchoolsThanStudents(InstanceError):
    pass


class ShapeMismatch(InstanceError):
    """Declared n/m disagree with the lengths of the supplied arrays."""


class PermutationError(RsdLabError, ValueError):
    pass


class SpecInvalid(RsdLabError, ValueError):
    """A generator or experiment specification violates one of its constraints."""


class NotBindingSchool(RsdLabError):
    def __init__(self, schools):
        self.schools = list(schools)
        super().__init__(f"schools never reach capacity under the mean demand: {self.schools}")


class InstanceTooLarge(RsdLabError, ValueError):
    pass
