"""
eigenbound/commands — The experiment CLI, one blueprint per command

Each blueprint registers its command at the top level of `flask`
(cli_group=None), so the commands read as `flask bound-compare`,
`flask contour-verify`, `flask sparsify-power` and `flask singular-rect`.
"""

from eigenbound.commands.bound_compare import bound_compare_bp
from eigenbound.commands.contour_verify import contour_verify_bp
from eigenbound.commands.singular_rect import singular_rect_bp
from eigenbound.commands.sparsify_power import sparsify_power_bp

BLUEPRINTS = (bound_compare_bp, contour_verify_bp, sparsify_power_bp, singular_rect_bp)
