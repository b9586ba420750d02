"""Interval-partition trees.

Embedded weighted ℝ-trees in ℓ₁ grown by bead crushing, the exchangeable
hierarchies obtained by sampling from them, the reconstruction of a tree from a
hierarchy, and a decision procedure for mass-structural equivalence.
"""

from .ipt_errors import (
    CodecError,
    CrushError,
    GeometryError,
    HierarchyError,
    IpTreeError,
    MeasureError,
    ModelError,
    TreeValidationError,
)
from .ipt_config import Tolerances, configure, current_tolerances, override
from .ipt_logger import BuildLogger, LogEntry
from .ipt_l1geom import Arc, L1Point, is_on_root_path, norm, path_distance, span_arcs, wedge
from .ipt_measure import (
    FadMeasure1D,
    OpenSubset01,
    TreeAtom,
    DensityArc,
    TreeMeasure,
    decompose,
    is_uniformized,
    open_set_to_uniformized,
    uniformize,
    uniformized_to_open_set,
)
from .ipt_beads import (
    RankedMasses,
    StringOfBeads,
    estimate_alpha_diversity,
    sample_poisson_dirichlet,
    sample_string_of_beads,
    stick_breaking,
)
from .ipt_tree import (
    CrushStep,
    IpTree,
    Violation,
    crush,
    fringe_mass,
    is_ip_tree,
    new_tree,
    special_points,
    spinal_diversity,
)
from .ipt_build import Model, build_coupled, build_model, reembed, replay
from .ipt_hierarchy import (
    Hierarchy,
    SpinalMatrix,
    brute_force_hierarchy_oracle,
    derive_hierarchy,
    estimate_spinal,
    mrca,
    reconstruct_tree,
    relabel_from_Z,
    relabel_to_Z,
    restrict,
)
from .ipt_equiv import MsCanonicalForm, canonical_form, ip_representative, ms_equivalent, prokhorov_distance
from .ipt_reports import render_report_lines, tree_report

__version__ = "0.1.0"

__all__ = [
    "IpTreeError",
    "GeometryError",
    "MeasureError",
    "ModelError",
    "CrushError",
    "TreeValidationError",
    "HierarchyError",
    "CodecError",
    "Tolerances",
    "configure",
    "current_tolerances",
    "override",
    "BuildLogger",
    "LogEntry",
    "L1Point",
    "Arc",
    "norm",
    "wedge",
    "is_on_root_path",
    "path_distance",
    "span_arcs",
    "FadMeasure1D",
    "OpenSubset01",
    "TreeAtom",
    "DensityArc",
    "TreeMeasure",
    "decompose",
    "is_uniformized",
    "uniformize",
    "open_set_to_uniformized",
    "uniformized_to_open_set",
    "RankedMasses",
    "StringOfBeads",
    "stick_breaking",
    "sample_poisson_dirichlet",
    "estimate_alpha_diversity",
    "sample_string_of_beads",
    "CrushStep",
    "IpTree",
    "Violation",
    "new_tree",
    "crush",
    "fringe_mass",
    "is_ip_tree",
    "special_points",
    "spinal_diversity",
    "Model",
    "build_model",
    "build_coupled",
    "replay",
    "reembed",
    "Hierarchy",
    "SpinalMatrix",
    "derive_hierarchy",
    "restrict",
    "mrca",
    "relabel_to_Z",
    "relabel_from_Z",
    "estimate_spinal",
    "reconstruct_tree",
    "brute_force_hierarchy_oracle",
    "MsCanonicalForm",
    "canonical_form",
    "ms_equivalent",
    "ip_representative",
    "prokhorov_distance",
    "tree_report",
    "render_report_lines",
]
