"""Exception types shared across the simulator."""


class CapacityError(RuntimeError):
    """Requested system size exceeds the documented memory limits."""


class TaylorOverflowError(ArithmeticError):
    """A Taylor coefficient became non-finite.

    Intermediate partial sums grow like exp(T*||H||/segments); hitting
    inf/NaN means the segment is too long and the interval must be split
    into more segments.
    """
