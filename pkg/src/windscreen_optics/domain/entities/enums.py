from enum import Enum


class PowerAxis(str, Enum):
    """Second-derivative direction of a refractive power map."""

    X = "x"
    Y = "y"
    XY = "xy"


class Orientation(str, Enum):
    """Measurement orientation of a spatial frequency."""

    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"

    @property
    def unit_vector(self) -> tuple[float, float]:
        """Direction of the spatial frequency vector."""
        return (1.0, 0.0) if self is Orientation.HORIZONTAL else (0.0, 1.0)


class MTFMethod(str, Enum):
    """Integration route for the shifted-pupil overlap integral."""

    QUADRATURE = "quadrature"
    RASTER = "raster"


class ChartEdge(str, Enum):
    """Side of a slanted square chart target."""

    RIGHT = "right"
    TOP = "top"
    LEFT = "left"
    BOTTOM = "bottom"

    @property
    def orientation(self) -> Orientation:
        """Frequency direction the edge measures."""
        if self in (ChartEdge.LEFT, ChartEdge.RIGHT):
            return Orientation.HORIZONTAL
        return Orientation.VERTICAL

    @property
    def quarter_turns(self) -> int:
        """Outward normal in quarter turns counter-clockwise from the right side."""
        return list(ChartEdge).index(self)
