"""Black-box optimization for chip macro and global placement."""
from .kernels import BACKEND as KERNEL_BACKEND
from .netlist import Canvas, Netlist, Placement, generate_synthetic, load, parse_bookshelf, parse_json, emit_json, select_macros
from .metrics import total_hpwl, net_hpwl, overlap_area, density_overflow

__version__ = "0.1.0"
