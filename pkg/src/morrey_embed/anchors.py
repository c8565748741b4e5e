"""Fixed table of rule anchors cited by classifier traces.

Each rule id maps to a short statement of the rule it encodes. Verdict
traces may only cite entries of this table; ``docs/anchors.md`` is rendered
from it.
"""

ANCHORS = {
    # normalization
    "coincide.large": "tau > 1/p, or tau = 1/p with q = inf: the space equals B^{s+d(tau-1/p)}_{inf,inf}",
    "coincide.f_boundary": "F^{s,1/p}_{p,q} with q < inf equals B^{s,1/q}_{q,q}",
    # outer threshold on bounded domains
    "domain.compact": "compact if and only if (s1-s2)/d > gamma",
    "domain.below_threshold": "no continuous embedding when (s1-s2)/d < gamma",
    # limiting case, large parameters
    "domain.target_large": "target in the large region: continuous iff (s1-s2)/d >= gamma, never compact at equality",
    "domain.source_large": "source in the large region, target not: at equality continuous iff q2 = inf",
    # classical tau1 = tau2 = 0
    "domain.classical_b": "classical B: at equality (s1-s2)/d = max(1/p1-1/p2, 0) continuous iff q1 <= q2",
    "domain.classical_f": "classical F: at equality continuous if 1/p1-1/p2 > 0 (any q), else iff q1 <= q2",
    # limiting case, B, both moderate
    "domain.b.product_order": "gamma = 1/p1-tau1-1/p2+tau2 > 0 and p1*tau1 < p2*tau2 is sufficient",
    "domain.b.equal_tau": "gamma = 1/p1-tau1-1/p2+tau2 > 0 and tau1 = tau2 is sufficient",
    "domain.b.ratio_tau": "gamma = 1/p1-tau1-1/p2+tau2 > 0, tau1 != tau2, p1/p2 = tau2/tau1 and q1 <= (p1/p2) q2 is sufficient",
    "domain.b.ratio_branch": "gamma = 1/p1-tau1-1/p2+(p1/p2)tau1 > 0 and q1 <= (p1/p2) q2 is sufficient",
    "domain.b.equal_smoothness": "s1 = s2 and q1 <= min(1, p1/p2) q2 is sufficient",
    "domain.b.necessary_q": "if gamma = 0 or gamma = 1/p1-tau1-1/p2+(p1/p2)tau1 > 0, continuity forces q1 <= q2",
    "domain.b.gap": "sufficient and necessary conditions do not meet for these parameters",
    # limiting case, F, both moderate
    "domain.f.interior_p": "both interior: 1/p1-1/p2 > tau1-tau2 is sufficient",
    "domain.f.interior_q": "both interior: q1 <= min(1, p1/p2) q2 is sufficient",
    "domain.f.interior_necessary": "both interior: continuity forces 1/p1-1/p2 > tau1-tau2 or q1 <= q2",
    "domain.f.boundary_both": "tau1 = 1/p1 and tau2 = 1/p2: continuous iff q1 <= q2",
    "domain.f.boundary_source": "tau1 = 1/p1, tau2 < 1/p2: q1 <= q2 is sufficient",
    "domain.f.boundary_source_necessary": "tau1 = 1/p1, tau2 < 1/p2: continuity forces q1 <= max(p2, q2)",
    "domain.f.boundary_target": "tau1 < 1/p1 and tau2 = 1/p2: continuous for all q",
    "domain.f.gap": "sufficient and necessary conditions do not meet for these parameters",
    # whole space
    "rn.b.target_large": "R^n, B, target large: continuous iff (s1-s2)/d >= 1/p1-tau1-1/p2+tau2",
    "rn.b.source_large": "R^n, B, source large: continuous iff [> and tau2 >= 1/p2] or [= and tau2 > 1/p2] or [= and tau2 = 1/p2 and q2 = inf]",
    "rn.b.moderate_sufficient": "R^n, B, both moderate: the full sufficient list (exponent, tau/p order, equality sub-cases) holds",
    "rn.b.equal_tau": "R^n, B: (s1-s2)/d = 1/p1-tau1-1/p2+tau2 > 0 with tau1 = tau2 > 0 is sufficient",
    "rn.b.moderate_necessary": "R^n, B, both moderate: exponent >= 0, tau1/p2 <= tau2/p1, (s1-s2)/d >= exponent and q1 <= q2 if s1 = s2 are necessary",
    "rn.b.ratio_branch_necessary": "R^n, B: (s1-s2)/d = 1/p1-tau1-1/p2+(p1/p2)tau1 > 0 forces q1 <= q2",
    "rn.b.gap": "R^n, B: sufficient and necessary conditions do not meet for these parameters",
    "rn.f.both_large": "R^n, F, both large: continuous iff (s1-s2)/d >= 1/p1-tau1-1/p2+tau2",
    "rn.f.interior": "R^n, F, both interior: continuous iff exponent >= 0, tau1/p2 <= tau2/p1 and the smoothness condition",
    "rn.f.target_large": "R^n, F, target large and source not: continuous iff (s1-s2)/d >= 1/p1-tau1-1/p2+tau2",
    "rn.f.not_covered": "R^n, F: this region combination is not decided by the known results",
    # Besov-Morrey endpoints
    "nn.to_hoelder": "N^{s1}_{u1,p1,q1} into B^{s2}_{inf,q2}: iff (s1-s2)/d > 1/u1, or equality with q1 <= q2",
    "nn.from_hoelder": "B^{s1}_{inf,q1} into N^{s2}_{u2,p2,q2}: iff s1 > s2, or s1 = s2 with q1 <= q2",
    # hybrid spaces, equal r
    "hybrid.r_positive": "equal r > 0: continuous iff s1 >= s2",
    "hybrid.r_zero_q2_inf": "r = 0, q2 = inf: continuous iff s1 >= s2",
    "hybrid.r_zero_q1_inf": "r = 0, q2 < inf, q1 = inf: continuous iff s1 > s2",
    "hybrid.r_zero_finite": "r = 0, q finite: s1 > s2 or (s1 = s2 and q1 <= min(1, p1/p2) q2) sufficient; s1 > s2 or (s1 = s2 and q1 <= q2) necessary",
    "hybrid.r_negative_p_ge": "r < 0, p1 >= p2: continuous iff s1 > s2 or (s1 = s2 and q1 <= q2)",
    "hybrid.r_negative_p_lt": "r < 0, p1 < p2: s1-s2 > r(p1/p2-1) or equality with q1 <= (p1/p2) q2 sufficient; equality needs q1 <= q2",
}


def citation(rule_id: str) -> str:
    """Citation text for ``rule_id``; unknown ids raise KeyError."""
    return ANCHORS[rule_id]


def render_markdown() -> str:
    lines = ["# Rule anchors", "", "| rule_id | statement |", "|---|---|"]
    for key, text in ANCHORS.items():
        lines.append(f"| `{key}` | {text.replace('|', '/')} |")
    return "\n".join(lines) + "\n"
