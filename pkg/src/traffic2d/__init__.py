"""traffic2d: a 2D two-class macroscopic traffic toolkit.

Subpackages cover the flux families and eigenstructure (model), the 2D
Riemann classifier and validators (riemann2d), the Strang-split Rusanov
solver (solver), trajectory calibration (calibration), kernel density
reconstruction (kde), the two-lane comparison model (multilane), and the
experiment CLI (cli). Hot sweep kernels are compiled when the extension is
available, with a numpy fallback (kernels).
"""

from .kernels import COMPILED, backend_name

__version__ = "0.1.0"
__all__ = ["COMPILED", "backend_name", "__version__"]
