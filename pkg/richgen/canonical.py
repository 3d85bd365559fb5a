"""
Canonical labeling of finite structures by colour refinement and individualization.
"""


def _local_signature(M, x, colour):
    relational = tuple(
        sorted(
            (name, tuple(colour[y] for y in t), tuple(i for i, y in enumerate(t) if y == x))
            for name, t in M.incident(x)
        )
    )
    functional = tuple(
        (
            name,
            colour.get(M.apply(name, x), -1),
            colour.get(M.preimage(name, x), -1),
        )
        for name in M.sig.bijections
    )
    return (relational, functional)


def refine(*pairs):
    """
    Joint colour refinement of one or more structures.

    Parameters
    ----------
    pairs : (FinStructure, dict)
        Structures with their initial colouring. Initial colours must be
        mutually comparable across all structures.

    Returns
    -------
    colourings : list of dict
        Stable colourings, one per structure. Colours are integers that depend
        only on isomorphism-invariant data, so they are comparable across structures.
    """
    palette = sorted({c for _, initial in pairs for c in initial.values()})
    rank = {c: i for i, c in enumerate(palette)}
    colourings = [{x: rank[initial[x]] for x in M.universe} for M, initial in pairs]
    classes = len(palette)

    while True:
        keys = [
            {x: (colour[x], _local_signature(M, x, colour)) for x in M.universe}
            for (M, _), colour in zip(pairs, colourings)
        ]
        palette = sorted({k for d in keys for k in d.values()})
        rank = {k: i for i, k in enumerate(palette)}
        colourings = [{x: rank[k] for x, k in d.items()} for d in keys]
        if len(palette) == classes:
            return colourings
        classes = len(palette)


def initial_colouring(M, fixed=tuple()):
    """ Colour elements by their position in ``fixed`` and the constants they interpret. """
    position = {x: i for i, x in enumerate(fixed)}
    return {x: (position.get(x, len(fixed)), M.constants_at(x)) for x in M.universe}


def _certificate(M, order, fixed):
    relations = tuple(
        (name, tuple(sorted(tuple(order[x] for x in t) for t in M.relation(name))))
        for name, _ in M.sig.relations
    )
    constants = tuple(sorted((name, order[x]) for name, x in M.const_interp.items()))
    bijections = tuple(
        (name, tuple(sorted((order[x], order[y]) for x, y in M.bij_interp[name].items())))
        for name in M.sig.bijections
    )
    return (
        M.sig.token(),
        len(M),
        tuple(order[x] for x in fixed),
        relations,
        constants,
        bijections,
    )


def canonical_form(M, fixed=tuple()):
    """
    Canonical label of ``M``. Two structures of the same signature have equal
    labels if and only if they are isomorphic; the elements of ``fixed`` are
    individualized by position, so that labels are equal if and only if an
    isomorphism maps ``fixed`` onto the other ``fixed`` tuple position by position.

    Parameters
    ----------
    M : FinStructure
    fixed : tuple of int, optional
        Distinct elements to individualize.

    Returns
    -------
    label : tuple
        Hashable, totally ordered label.
    """
    fixed = tuple(fixed)
    best = None

    def search(colour):
        nonlocal best
        cells = dict()
        for x, c in colour.items():
            cells.setdefault(c, list()).append(x)

        target = min((c for c, cell in cells.items() if len(cell) > 1), default=None)
        if target is None:
            cert = _certificate(M, colour, fixed)
            if best is None or cert < best:
                best = cert
            return

        for x in sorted(cells[target]):
            individualized = {y: (c, 0 if y == x else 1) for y, c in colour.items()}
            search(refine((M, individualized))[0])

    search(refine((M, initial_colouring(M, fixed)))[0])
    return best
