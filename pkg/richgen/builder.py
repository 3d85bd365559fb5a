"""
Stage-by-stage construction of rich models.

A build starts from a seed member and repeatedly takes the least extension task
that the current stage does not realize yet, then applies amalgamation to realize it.
"""
import heapq
import json
from itertools import count
from warnings import warn

from . import ModelException, ModelWarning
from .base import AmalgamationError
from .engine import amalgamate
from .morphisms import PartialMorphism, find_total_extension, identity
from .structures import (
    StructureError,
    induced_substructure,
    relabel,
    structure_from_json,
    structure_to_json,
)
from .utils import subsets


class TraceError(ModelException):
    """ A build trace cannot be replayed. """

    pass


class SkippedTaskWarning(ModelWarning):
    """ A build skipped an extension task because amalgamation failed. """

    pass


def _as_tuples(obj):
    if isinstance(obj, list):
        return tuple(_as_tuples(item) for item in obj)
    return obj


def _as_lists(obj):
    if isinstance(obj, tuple):
        return [_as_lists(item) for item in obj]
    return obj


class ExtensionTask:
    """
    Extension task ``(M, f)``: a member ``M`` and a class morphism ``f: M -> U`` into
    the structure under construction, defined on fewer elements than ``M``.

    Parameters
    ----------
    source : FinStructure
    anchor : PartialMorphism
    discovered_at : int
        Stage at which the task became visible.
    label : tuple
        Canonical label of ``M`` with the domain of ``f`` individualized.
    size : int
        Size of ``M``, as measured by the class.

    Raises
    ------
    ValueError : if the anchor is defined on the whole of ``M``.
    """

    __slots__ = ("source", "anchor", "discovered_at", "label", "size")

    def __init__(self, source, anchor, discovered_at, label, size):
        if len(anchor) >= len(source):
            raise ValueError("Anchor must be defined on fewer elements than the source, not {}".format(len(anchor)))
        self.source = source
        self.anchor = anchor
        self.discovered_at = discovered_at
        self.label = label
        self.size = size

    @property
    def anchor_ids(self):
        """ Non-constant elements of the anchor image, in increasing order. """
        consts = self.anchor.target.constant_elements
        return tuple(sorted(y for y in self.anchor.image if y not in consts))

    @property
    def priority(self):
        return max(self.size, self.discovered_at)

    @property
    def newest(self):
        """ Largest non-constant anchor element, or -1 if the anchor holds only constants. """
        ids = self.anchor_ids
        return ids[-1] if ids else -1

    @property
    def key(self):
        """
        Position of the task in the build order. Within a priority level, tasks anchored
        in older elements come first, so the earliest elements are finished before later ones.
        """
        return (self.priority, self.newest, self.label, self.anchor_ids)

    def __repr__(self):
        return "<ExtensionTask: size {} over {}, discovered at {}>".format(self.size, self.anchor_ids, self.discovered_at)


def _tasks_over(spec, U, anchor, src_bound, discovered_at):
    """ Tasks whose anchor image is the constants of ``U`` plus ``anchor``. """
    base_ids = sorted(set(U.constant_elements) | set(anchor))
    base = relabel(induced_substructure(U, base_ids), {x: i for i, x in enumerate(base_ids)})
    mapping = dict(enumerate(base_ids))
    for fresh in range(1, src_bound - len(anchor) + 1):
        for label, M in spec.extension_types(base, fresh):
            f = PartialMorphism(M, U, mapping)
            if spec.is_morphism(f):
                yield ExtensionTask(M, f, discovered_at, label, spec.size(M))


def enumerate_tasks(spec, U, src_bound, anchor_bound, anchor_set=None, discovered_at=0):
    """
    Extension tasks ``(M, f)`` into ``U``, up to isomorphism of the pair.

    The domain of every anchor ``f`` consists of the constants and at most ``anchor_bound``
    other elements, which are mapped into ``anchor_set`` (default: every element of ``U``
    that interprets no constant). Sources have size at most ``src_bound``.

    Returns
    -------
    tasks : list of ExtensionTask
        Sorted by task key.
    """
    if src_bound < 0 or anchor_bound < 0:
        raise ValueError("Bounds must be non-negative, not {} and {}".format(src_bound, anchor_bound))
    anchor_set = U.free_elements if anchor_set is None else sorted(anchor_set)
    tasks = list()
    for anchor in subsets(anchor_set, min(anchor_bound, src_bound - 1)):
        tasks.extend(_tasks_over(spec, U, anchor, src_bound, discovered_at))
    return sorted(tasks, key=lambda task: task.key)


class TaskQueue:
    """
    Queue of extension tasks, ordered by key. Tasks are discovered in batches, one per
    stage; a batch is only enumerated once the queue reaches its priority level,
    so only a few levels are held in memory at any time.

    Parameters
    ----------
    spec : ClassSpec
    src_bound : int
        Largest size of task sources.
    anchor_bound : int
        Largest number of non-constant anchor elements.
    """

    def __init__(self, spec, src_bound, anchor_bound):
        self.spec = spec
        self.src_bound = src_bound
        self.anchor_bound = min(anchor_bound, src_bound - 1)
        self.resolved = set()
        self._born = dict()
        self._batches = list()
        self._heap = list()
        self._counter = count()

    def discover(self, new_elements, stage):
        """ Register the elements added at ``stage``. The seed is discovered at stage 0. """
        new_elements = tuple(new_elements)
        for x in new_elements:
            self._born[x] = stage
        if new_elements or stage == 0:
            heapq.heappush(self._batches, (stage, new_elements))

    def _materialize(self, U):
        stage, new_elements = heapq.heappop(self._batches)
        new = set(new_elements)
        existing = [x for x in U.free_elements if self._born.get(x, stage + 1) <= stage]
        for anchor in subsets(existing, self.anchor_bound):
            if stage > 0 and new.isdisjoint(anchor):
                continue
            for task in _tasks_over(self.spec, U, anchor, self.src_bound, stage):
                heapq.heappush(self._heap, (task.key, next(self._counter), task))

    def pop(self, U):
        """
        Least pending task, or None if the queue is exhausted. Anchors are returned
        with ``U`` as their target.
        """
        while True:
            if self._batches and (not self._heap or self._heap[0][0][0] >= self._batches[0][0]):
                self._materialize(U)
                continue
            if not self._heap:
                return None
            _, _, task = heapq.heappop(self._heap)
            if task.key in self.resolved:
                continue
            self.resolved.add(task.key)
            task.anchor = task.anchor.retarget(U)
            return task

    def __len__(self):
        return len(self._heap)


class TraceEntry:
    """
    One stage of a build.

    Parameters
    ----------
    key : tuple
        Key of the task resolved at this stage.
    source : FinStructure
        Source of the task.
    anchor : tuple of (int, int)
        Graph of the anchor.
    new_ids : tuple of int
        Elements added at this stage.
    skipped : str or None, optional
        Reason for skipping the task, if amalgamation failed.
    """

    def __init__(self, key, source, anchor, new_ids, skipped=None):
        self.key = key
        self.source = source
        self.anchor = tuple(tuple(pair) for pair in anchor)
        self.new_ids = tuple(new_ids)
        self.skipped = skipped

    def to_json(self):
        return {
            "key": _as_lists(self.key),
            "source": structure_to_json(self.source),
            "anchor": [list(pair) for pair in self.anchor],
            "new_ids": list(self.new_ids),
            "skipped": self.skipped,
        }

    @classmethod
    def from_json(cls, doc):
        return cls(
            _as_tuples(doc["key"]),
            structure_from_json(doc["source"]),
            doc["anchor"],
            doc["new_ids"],
            doc.get("skipped"),
        )


class BuildTrace:
    """
    Ordered record of the stages of a build, sufficient to replay it.

    Parameters
    ----------
    spec_name : str
    seed : FinStructure
    src_bound, anchor_bound : int
    size_cap : int or None
    """

    def __init__(self, spec_name, seed, src_bound, anchor_bound, size_cap=None):
        self.spec_name = spec_name
        self.seed = seed
        self.src_bound = src_bound
        self.anchor_bound = anchor_bound
        self.size_cap = size_cap
        self.entries = list()
        self.realized = 0
        self.pending = 0
        self.stop_reason = None

    @property
    def stages(self):
        return len(self.entries)

    @property
    def skipped(self):
        return [entry for entry in self.entries if entry.skipped is not None]

    @property
    def conforming(self):
        """ Whether no task was skipped. """
        return not self.skipped

    def to_json(self):
        return {
            "spec": self.spec_name,
            "seed": structure_to_json(self.seed),
            "src_bound": self.src_bound,
            "anchor_bound": self.anchor_bound,
            "size_cap": self.size_cap,
            "realized": self.realized,
            "pending": self.pending,
            "stop_reason": self.stop_reason,
            "stages": [entry.to_json() for entry in self.entries],
        }

    @classmethod
    def from_json(cls, doc):
        """
        Raises
        ------
        TraceError : if the document is not a build trace.
        """
        try:
            trace = cls(doc["spec"], structure_from_json(doc["seed"]), doc["src_bound"], doc["anchor_bound"], doc.get("size_cap"))
            trace.entries = [TraceEntry.from_json(entry) for entry in doc["stages"]]
            trace.realized = doc.get("realized", 0)
            trace.pending = doc.get("pending", 0)
            trace.stop_reason = doc.get("stop_reason")
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            if isinstance(e, StructureError):
                raise TraceError("Malformed structure in trace: {}".format(e))
            raise TraceError("Malformed trace document: {}".format(e))
        return trace

    def dump(self, path):
        with open(path, "w") as f:
            json.dump(self.to_json(), f, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path):
        with open(path) as f:
            try:
                doc = json.load(f)
            except json.JSONDecodeError as e:
                raise TraceError("Invalid JSON in {}: {}".format(path, e))
        return cls.from_json(doc)

    def __repr__(self):
        return "<BuildTrace of {}: {} stages, stopped on {}>".format(self.spec_name, self.stages, self.stop_reason)


def build_generic(spec, seed, max_stages, src_bound=3, size_cap=None, anchor_bound=None):
    """
    Build a stage approximation of the rich model of ``spec`` containing ``seed``.

    At each stage, the least pending task whose anchor does not extend to a total class
    morphism into the current stage is realized by amalgamating the anchor with the
    identity of its source. Tasks found already realized do not consume a stage.

    Parameters
    ----------
    spec : ClassSpec
    seed : FinStructure
        Member of the class.
    max_stages : int
        Maximum number of stages.
    src_bound : int, optional
        Largest size of task sources.
    size_cap : int or None, optional
        Largest size of a stage. A build stops instead of exceeding it.
    anchor_bound : int or None, optional
        Largest number of non-constant anchor elements. Default is ``src_bound - 1``.

    Returns
    -------
    U : FinStructure
        Last stage.
    trace : BuildTrace

    Raises
    ------
    StructureError : if ``seed`` is not a member.
    ValueError : if bounds are invalid.
    """
    if max_stages < 0:
        raise ValueError("max_stages must be non-negative, not {}".format(max_stages))
    if src_bound < 1:
        raise ValueError("src_bound must be positive, not {}".format(src_bound))
    if not spec.is_member(seed):
        raise StructureError("Seed must be a member of {}".format(spec.name))
    anchor_bound = src_bound - 1 if anchor_bound is None else anchor_bound

    U = seed
    trace = BuildTrace(spec.name, seed, src_bound, anchor_bound, size_cap)
    queue = TaskQueue(spec, src_bound, anchor_bound)
    queue.discover(U.free_elements, stage=0)

    while trace.stages < max_stages:
        task = queue.pop(U)
        if task is None:
            trace.stop_reason = "exhausted"
            break

        M, anchor = task.source, task.anchor
        if not spec.is_morphism(anchor):
            continue
        if find_total_extension(spec, anchor) is not None:
            trace.realized += 1
            continue

        try:
            N, _, _ = amalgamate(spec, anchor, identity(M))
        except AmalgamationError as e:
            warn(message="Task {} skipped: {}".format(task, e), category=SkippedTaskWarning)
            trace.entries.append(TraceEntry(task.key, M, anchor.graph, tuple(), skipped=str(e)))
            continue

        if size_cap is not None and spec.size(N) > size_cap:
            trace.stop_reason = "size_cap"
            break

        new_ids = tuple(sorted(set(N.universe) - set(U.universe)))
        trace.entries.append(TraceEntry(task.key, M, anchor.graph, new_ids))
        U = N
        queue.discover(new_ids, stage=trace.stages)
    else:
        trace.stop_reason = "max_stages"

    trace.pending = len(queue)
    return U, trace


def replay(spec, seed, trace, stages=None):
    """
    Re-apply the amalgamations recorded in ``trace``, without any task enumeration.

    Parameters
    ----------
    spec : ClassSpec
    seed : FinStructure
        Seed of the build; must be the seed recorded in the trace.
    trace : BuildTrace
    stages : int or None, optional
        Number of stages to replay. Default is all of them.

    Raises
    ------
    TraceError : if the seed differs, an amalgamation fails, or new element ids differ.
    """
    if seed != trace.seed:
        raise TraceError("Seed differs from the seed recorded in the trace")
    if trace.spec_name != spec.name:
        raise TraceError("Trace was recorded for {}, not {}".format(trace.spec_name, spec.name))

    U = seed
    for index, entry in enumerate(trace.entries[:stages]):
        if entry.skipped is not None:
            continue
        try:
            anchor = PartialMorphism(entry.source, U, entry.anchor)
            N, _, _ = amalgamate(spec, anchor, identity(entry.source))
        except ModelException as e:
            raise TraceError("Stage {} cannot be replayed: {}".format(index, e))
        new_ids = tuple(sorted(set(N.universe) - set(U.universe)))
        if new_ids != entry.new_ids:
            raise TraceError("Stage {} added {}, but the trace records {}".format(index, new_ids, entry.new_ids))
        U = N
    return U


def trace_prefix(spec, trace, stages):
    """ Stage reached after the first ``stages`` entries of ``trace``. """
    return replay(spec, trace.seed, trace, stages)
