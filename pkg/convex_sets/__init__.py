from .bodies import (
    Box,
    ConvexBody,
    Ellipsoid,
    EuclideanBall,
    LpBall,
    PolytopeH,
    PolytopeV,
    Simplex,
    box,
    build_body,
    euclidean_ball,
    load_body,
    lp_ball,
    require_symmetric,
    unit_cube,
)
from .cover import SphereCover, sphere_cover
from .models import BodyMetadata, BodySpec, Separation
