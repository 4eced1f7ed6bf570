"""Registry of the four reduced ODEs handled by the toolkit.

Each reduced ODE is stored exactly in the form used for the expansion; the
step from the fractional PDE to the ODE is metadata (the transform template),
not symbolic machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..symexpr import Expr, parse


@dataclass(frozen=True)
class TransformTemplate:
    """How the wave coordinate is built from the free parameters.

    ``k`` and ``speed`` are expressions for the ``k`` and ``c`` fields of
    :class:`fracwave.fracderiv.TransformParams`.  ``beta`` is ``"free"``,
    ``"alpha"`` (tied to the time order) or ``"1"``.
    """

    k: str
    speed: str
    sign: int
    beta: str = "free"

    def xi_expr(self) -> Expr:
        """Symbolic coordinate in x and t, with fractional powers as exp/ln."""
        k = parse(self.k)
        speed = parse(self.speed)
        beta = {"free": "beta", "alpha": "alpha", "1": "1"}[self.beta]
        if beta == "1":
            xpart = parse("x")
        else:
            xpart = parse(f"exp({beta}*ln(x))/gamma(1 + {beta})")
        tpart = parse("exp(alpha*ln(t))/gamma(1 + alpha)")
        return k * xpart + self.sign * speed * tpart


@dataclass(frozen=True)
class EquationSpec:
    name: str
    functions: tuple[str, ...]
    odes: tuple[Expr, ...]
    constants: tuple[str, ...]
    unknowns: tuple[str, ...]  # solve unknowns, in pivot-preference order
    free: tuple[str, ...]  # parameters left symbolic in solutions
    nonzero: tuple[str, ...]  # free parameters assumed non-zero
    prefixes: tuple[str, ...]  # ansatz coefficient family per function
    transform: TransformTemplate
    var: str = "xi"
    kernel: str = "E"
    aux: tuple[str, ...] = ("p", "q", "r")

    def __post_init__(self):
        allowed = (
            set(self.functions)
            | {self.var}
            | set(self.constants)
            | set(self.unknowns)
            | set(self.free)
            | set(self.aux)
        )
        for ode in self.odes:
            extra = ode.free_symbols - allowed
            if extra:
                raise ValueError(f"{self.name}: unexpected symbols {sorted(extra)}")


def _ode(text: str) -> Expr:
    return parse(text)


BURGERS = EquationSpec(
    name="burgers",
    functions=("w",),
    odes=(_ode("c*w + k*w^2 + A*k^2*D(w, xi, 1)"),),
    constants=("A",),
    unknowns=("A1", "c", "A0"),
    free=("k", "A", "p", "q", "r"),
    nonzero=("k", "A", "p"),
    prefixes=("A",),
    transform=TransformTemplate(k="k", speed="c", sign=-1),
)

COUPLED_BURGERS = EquationSpec(
    name="coupled-burgers",
    functions=("u", "v"),
    odes=(
        _ode(
            "c*D(u, xi, 1) - D(u, xi, 2) + 2*u*D(u, xi, 1)"
            " + L*(D(u, xi, 1)*v + u*D(v, xi, 1))"
        ),
        _ode(
            "c*D(v, xi, 1) - D(v, xi, 2) + 2*v*D(v, xi, 1)"
            " + M*(D(u, xi, 1)*v + u*D(v, xi, 1))"
        ),
    ),
    constants=("L", "M"),
    unknowns=("A1", "B1", "c", "A0"),
    free=("B0", "L", "M", "p", "q", "r"),
    nonzero=("p",),
    prefixes=("A", "B"),
    transform=TransformTemplate(k="1", speed="c", sign=1, beta="alpha"),
)

FOAM_DRAINAGE = EquationSpec(
    name="foam-drainage",
    functions=("V",),
    odes=(
        _ode(
            "-c*D(V, xi, 1) + 1/2*k^2*V*D(V, xi, 2) + 2*k*V^2*D(V, xi, 1)"
            " + k^2*D(V, xi, 1)^2"
        ),
    ),
    constants=(),
    unknowns=("A1", "c", "A0"),
    free=("k", "p", "q", "r"),
    nonzero=("k", "p"),
    prefixes=("A",),
    transform=TransformTemplate(k="k", speed="c", sign=1),
)

SAWADA_KOTERA = EquationSpec(
    name="sawada-kotera",
    functions=("w",),
    odes=(_ode("-c*w + 5/3*w^3 + 5*k^2*w*D(w, xi, 2) + k^4*D(w, xi, 4)"),),
    constants=(),
    unknowns=("A2", "A1", "c", "A0"),
    free=("k", "p", "q", "r"),
    nonzero=("k", "p"),
    prefixes=("A",),
    transform=TransformTemplate(k="k", speed="k*c", sign=-1, beta="1"),
)

EQUATIONS: dict[str, EquationSpec] = {
    s.name: s for s in (BURGERS, COUPLED_BURGERS, FOAM_DRAINAGE, SAWADA_KOTERA)
}


class UnknownEquationError(KeyError):
    def __str__(self):
        return f"unknown equation {self.args[0]!r}; known: {', '.join(EQUATIONS)}"


def get_equation(name: str) -> EquationSpec:
    try:
        return EQUATIONS[name]
    except KeyError:
        raise UnknownEquationError(name) from None
