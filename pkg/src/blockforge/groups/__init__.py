from .families import (alternating, cyclic, frobenius_psl2_8, grid_perm, psl2, psl3_2,
                       sigma_psl2, symmetric, wreath_imprimitive, wreath_on_system,
                       wreath_product_action)
from .group import (BlockSystem, PermGroup, find_block_systems, group_order, orbit, set_orbit,
                    set_orbit_array,
                    point_stabilizer, subdegrees)
from .grpfile import format_group, parse_group_text, read_group, write_group
from .perm import Permutation, format_cycles, parse_permutation

__all__ = [
    "BlockSystem", "PermGroup", "Permutation", "alternating", "cyclic", "find_block_systems",
    "format_cycles", "format_group", "frobenius_psl2_8", "grid_perm", "group_order", "orbit",
    "parse_group_text", "parse_permutation", "point_stabilizer", "psl2", "psl3_2", "read_group",
    "set_orbit", "set_orbit_array", "sigma_psl2", "subdegrees", "symmetric", "wreath_imprimitive", "wreath_on_system", "wreath_product_action",
    "write_group",
]
