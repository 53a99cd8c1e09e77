"""Prescribed evolution paths on the Bloch sphere."""

from geogates.paths.segments import (Segment,  # noqa: F401
                                     SegmentKind,
                                     SegmentSample,
                                     Meridian,
                                     LatitudeArc,
                                     TiltedCircle,
                                     Custom,
                                     segment_from_dict,
                                     to_cartesian)
from geogates.paths.rate import (RateProfile,  # noqa: F401
                                 IdentityRate,
                                 PowerRate,
                                 SineRate,
                                 KnotRate,
                                 ComposedRate,
                                 rate_from_dict,
                                 random_sine_warp)
from geogates.paths.curve import (ParamCurve,  # noqa: F401
                                  CurvePoint,
                                  CurveSamples,
                                  LengthConvention,
                                  chart_axis_for,
                                  min_circle_curve,
                                  path_length,
                                  path_lengths,
                                  rabi_magnitude_area,
                                  sample,
                                  solid_angle_phase)
