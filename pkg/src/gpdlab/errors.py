"""Exception hierarchy shared by all gpdlab modules."""


class GpdlabError(Exception):
    pass


class AxiomViolation(GpdlabError):
    """A groupoid or group table fails an axiom; ``where`` names the offending tuple."""

    def __init__(self, message, where=None):
        super().__init__(message if where is None else f"{message} at {where}")
        self.where = where


class NotComposable(GpdlabError):
    pass


class NotSubgroupoid(GpdlabError):
    pass


class NotGroupBundle(GpdlabError):
    pass


class GroupoidMismatch(GpdlabError):
    pass


class SupportOutsideInteriorIsotropy(GpdlabError):
    pass


class NotAUnit(GpdlabError):
    pass


class NumericalDegeneracy(GpdlabError):
    pass


class ClosureNotIdeal(GpdlabError):
    pass


class NotCentralInclusion(GpdlabError):
    pass


class NotPositive(GpdlabError):
    def __init__(self, eigenvalue):
        super().__init__(f"functional is not positive: Gram eigenvalue {eigenvalue:.3e}")
        self.eigenvalue = eigenvalue


class NotPositiveDefinite(GpdlabError):
    pass


class NotANormalizer(GpdlabError):
    def __init__(self, index):
        super().__init__(f"normalizer #{index} does not normalize the subalgebra")
        self.index = index


class NotRegularInclusion(GpdlabError):
    pass


class BoundTooLarge(GpdlabError):
    pass
