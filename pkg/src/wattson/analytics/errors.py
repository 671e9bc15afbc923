"""Analytics error types; tool dispatch turns these into error observations."""


class AnalyticsError(Exception):
    pass


class ParseError(AnalyticsError):
    pass


class NoDatasetLoaded(AnalyticsError):
    def __init__(self) -> None:
        super().__init__("no energy dataset loaded; call load_energy_data first")


class EmptyRange(AnalyticsError):
    pass


class UnknownAppliance(AnalyticsError):
    pass


class WindowTooLarge(AnalyticsError):
    pass


class InsufficientCoverage(AnalyticsError):
    pass


class FlatRateNoPeaks(AnalyticsError):
    def __init__(self) -> None:
        super().__init__(
            "peak-hour analysis needs a time-of-use rate; the selected rate is flat "
            "(every hour costs the same, so there are no peak windows to analyze)"
        )


class MissingThreshold(AnalyticsError):
    pass


class NoSolarData(AnalyticsError):
    def __init__(self) -> None:
        super().__init__("dataset has no solar_generation series")


class MissingDirectory(AnalyticsError):
    pass


class OverlappingPeriods(AnalyticsError):
    pass
