from src.analysis.classical.base import ClassicalReconstructor
from src.analysis.classical.dgi import DGIReconstructor, dgi, dgi_raw
from src.analysis.classical.fista import FistaConfig, FistaResult, FISTAReconstructor, fista, fista_solve
from src.analysis.classical.linear_probe import LinearProbeReconstructor
from src.analysis.classical.pseudo_inverse import PseudoInverseReconstructor, pseudo_inverse, pseudo_inverse_raw
from src.analysis.classical.transforms import dct2, idct2, soft_threshold
from src.utils.errors import ConfigError

RECONSTRUCTORS = {
    "dgi": DGIReconstructor,
    "pi": PseudoInverseReconstructor,
    "fista": FISTAReconstructor,
}


def build_reconstructor(method: str, patterns, fista_config: FistaConfig | None = None) -> ClassicalReconstructor:
    if method not in RECONSTRUCTORS:
        raise ConfigError(f"Unknown classical method '{method}'. Available: {', '.join(RECONSTRUCTORS)}")
    if method == "fista":
        return FISTAReconstructor(patterns, fista_config)
    return RECONSTRUCTORS[method](patterns)


__all__ = [
    "ClassicalReconstructor",
    "DGIReconstructor",
    "FISTAReconstructor",
    "FistaConfig",
    "FistaResult",
    "LinearProbeReconstructor",
    "PseudoInverseReconstructor",
    "RECONSTRUCTORS",
    "build_reconstructor",
    "dct2",
    "dgi",
    "dgi_raw",
    "fista",
    "fista_solve",
    "idct2",
    "pseudo_inverse",
    "pseudo_inverse_raw",
    "soft_threshold",
]
