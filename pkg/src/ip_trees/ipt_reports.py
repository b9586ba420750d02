"""Summary reports for trees, printed by the CLI next to its JSON output."""
from __future__ import annotations

from typing import Any, Dict, List, Optional

from .ipt_measure import decompose
from .ipt_tree import IpTree, is_ip_tree, special_points


def tree_report(tree: IpTree, *, tol: Optional[float] = None, max_violations: int = 5) -> Dict[str, Any]:
    """Project a tree into counts, masses and the outcome of the IP checks.

    Parameters
    ----------
    tree:
        Any weighted tree; invalid trees are reported, not rejected.
    max_violations:
        How many violation descriptions to keep in the payload.
    """

    ok, violations = is_ip_tree(tree, tol)
    resolved, skeleton, pending = decompose(tree.weight)
    report: Dict[str, Any] = {
        "arcs": len(tree.arcs),
        "atoms": len(tree.weight.atoms),
        "density_arcs": len(tree.weight.density),
        "steps": len(tree.build_log),
        "pauses": sum(1 for step in tree.build_log if step.paused),
        "total_mass": tree.weight.total_mass,
        "resolved_mass": resolved.total_mass,
        "density_mass": skeleton.total_mass,
        "pending_mass": pending.total_mass,
        "ip_tree": ok,
        "violation_count": len(violations),
        "violations": [v.describe() for v in violations[:max_violations]],
    }
    report["special_points"] = len(special_points(tree, require_ip=True, tol=tol)) if ok else None
    return report


def render_report_lines(report: Dict[str, Any]) -> List[str]:
    """Render a report payload into CLI-friendly lines."""

    lines = [
        "=== IP Tree Report ===",
        f"Arcs: {report.get('arcs', 0)}  Atoms: {report.get('atoms', 0)}  "
        f"Density arcs: {report.get('density_arcs', 0)}",
        f"Steps: {report.get('steps', 0)} ({report.get('pauses', 0)} paused)",
        f"Total mass: {report.get('total_mass', 0.0):.12g}",
    ]
    lines.append("-- Decomposition --")
    lines.append(f"resolved atoms: {report.get('resolved_mass', 0.0):.6g}")
    lines.append(f"density: {report.get('density_mass', 0.0):.6g}")
    lines.append(f"pending atoms: {report.get('pending_mass', 0.0):.6g}")
    if report.get("special_points") is not None:
        lines.append(f"Special points: {report['special_points']}")
    lines.append(f"IP tree: {'yes' if report.get('ip_tree') else 'no'}")
    violations = report.get("violations") or []
    if violations:
        lines.append(f"-- Violations ({report.get('violation_count', len(violations))}) --")
        lines.extend(violations)
    return lines
