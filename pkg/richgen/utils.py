from contextlib import contextmanager
from functools import wraps
from itertools import combinations, permutations
from threading import local

from warnings import warn
from . import ModelException, ModelWarning

_state = local()


class AuditWarning(ModelWarning):
    """ Warning emitted when an amalgam fails verification in warn-only audit mode. """

    pass


def audit_level():
    """ Returns the current audit level: ``None``, ``"warn"`` or ``"strict"``. """
    return getattr(_state, "level", None)


@contextmanager
def audit_mode(strict=True):
    """
    Context manager that machine-checks every amalgam computed
    within the ``with`` block: the amalgam must be a member of the class,
    both legs must be total class morphisms, and the amalgamation square
    must commute.

    Parameters
    ----------
    strict : bool, optional
        If True (default), a failed verification raises ``AmalgamationError``.
        Otherwise, a warning of type ``richgen.utils.AuditWarning`` is emitted
        and the amalgam is returned as-is.

    Raises
    ------
    ValueError : if ``strict`` is not a boolean.

    .. warning::

        Audit state is thread-local; amalgams computed in worker threads
        are not audited unless the context is entered in those threads.
    """
    if not isinstance(strict, bool):
        raise ValueError("strict must be a boolean, not {}".format(strict))

    previous = audit_level()
    _state.level = "strict" if strict else "warn"
    try:
        yield
    finally:
        _state.level = previous


def audited(verify, exception=ModelException):
    """
    Decorator factory. The decorated function ``f(*args, **kwargs)`` is
    followed, in audit mode, by ``verify(result, *args, **kwargs)``, which returns
    a list of problems (empty if the result is sound).

    In strict audit mode, problems are raised as ``exception``. In warn-only
    audit mode, a warning of type ``richgen.utils.AuditWarning`` is thrown
    instead. Outside of audit mode, ``verify`` is never called.
    """

    def decorator(f):
        @wraps(f)
        def checked(*args, **kwargs):
            result = f(*args, **kwargs)
            level = audit_level()
            if level is None:
                return result

            problems = verify(result, *args, **kwargs)
            if not problems:
                return result

            message = "Audit of {} failed: {}".format(f.__name__, "; ".join(problems))
            if level == "strict":
                raise exception(message)
            warn(message=message, category=AuditWarning)
            return result

        return checked

    return decorator


def least_unused(used, count):
    """
    Returns the ``count`` least natural numbers not in ``used``, in increasing order.

    Parameters
    ----------
    used : iterable of int
        Element ids already taken.
    count : int
        Number of fresh ids.

    Returns
    -------
    fresh : list of int
    """
    used = set(used)
    fresh = list()
    candidate = 0
    while len(fresh) < count:
        if candidate not in used:
            fresh.append(candidate)
        candidate += 1
    return fresh


def subsets(elements, max_size=None, min_size=0):
    """ Yields subsets of ``elements`` as sorted tuples, by increasing size then lexicographically. """
    elements = sorted(elements)
    if max_size is None:
        max_size = len(elements)
    for size in range(min_size, min(max_size, len(elements)) + 1):
        yield from combinations(elements, size)


def partial_injections(domain, codomain, max_size=None):
    """
    Yields every injective partial function from ``domain`` to ``codomain`` as a dictionary.

    Maps are produced by increasing size, then by domain, then by image, so the
    enumeration order is deterministic.
    """
    codomain = sorted(codomain)
    for dom in subsets(domain, max_size):
        for image in permutations(codomain, len(dom)):
            yield dict(zip(dom, image))
