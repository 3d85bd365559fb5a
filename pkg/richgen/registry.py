"""
Built-in classes by name.
"""
from .automorphisms import AutomorphismGraphSpec
from .graphs import GraphClassSpec
from .triangles import OMEGA, ConstantsTrianglesSpec


def class_names():
    """ Name patterns understood by ``get_class``. """
    return ("graphs", "ct", "ct:<n>", "ct:omega", "autograph", "autograph-cyclefree:<L>")


def get_class(name, **kwargs):
    """
    Class specification registered under ``name``.

    Parameters
    ----------
    name : str
        One of ``graphs``, ``ct``, ``ct:<n>``, ``ct:omega``, ``autograph`` or
        ``autograph-cyclefree:<L>``.
    kwargs
        Keyword arguments passed to the ``ConstantsTrianglesSpec`` constructor
        (``constants``, ``triangle_floor``) for the ``ct`` family.

    Raises
    ------
    ValueError : if ``name`` is unknown.
    """
    family, _, parameter = name.partition(":")

    if family == "graphs" and not parameter:
        return GraphClassSpec()

    if family == "autograph" and not parameter:
        return AutomorphismGraphSpec()

    if family == "autograph-cyclefree" and parameter.isdigit():
        return AutomorphismGraphSpec(cycle_free=int(parameter))

    if family == "ct":
        if not parameter:
            return ConstantsTrianglesSpec(None, **kwargs)
        if parameter == OMEGA:
            return ConstantsTrianglesSpec(OMEGA, **kwargs)
        if parameter.isdigit():
            return ConstantsTrianglesSpec(int(parameter), **kwargs)

    raise ValueError("Class name must be one of {}, not {}".format(", ".join(class_names()), name))
