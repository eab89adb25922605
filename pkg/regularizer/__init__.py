from .piecewise import PiecewiseRegularizer
from .pieces import QuasiQuadraticPiece
from .serialization import deserialize, serialize
from .views import RegularizerView, closed_form_argmin
