"""treecover: (1+eps)-stretch Euclidean tree covers with bounded degree
and a compact routing scheme on top of them."""

__version__ = "0.1.0"

from .params import CoverParams
from .assembly import build_tree_cover, LazyTreeCover
from .tree_model import CoverTree, TreeCover, serialize, deserialize
from .partial_nonsteiner import partial_cover_nonsteiner, build_strip_family
from .partial_steiner import partial_cover_steiner, build_slabs
from .verify import stretch_oracle, partial_oracle, bench
from .routing import build_routing, build_interval_routing, far_labels, far_decide

__all__ = [
    "CoverParams",
    "build_tree_cover",
    "LazyTreeCover",
    "CoverTree",
    "TreeCover",
    "serialize",
    "deserialize",
    "partial_cover_nonsteiner",
    "partial_cover_steiner",
    "build_strip_family",
    "build_slabs",
    "stretch_oracle",
    "partial_oracle",
    "bench",
    "build_routing",
    "build_interval_routing",
    "far_labels",
    "far_decide",
]
