"""Normal-form reductions of Poisson families."""

from .a_type import (ANormalForm, CasimirFamily, a_casimir, a_normal_form, casimir_profile,
                     solve_casimir_ansatz, split_morse)
from .n_type import NFamilyNormalForm, n_reduce
from .planar import (EigenPair, PlanarFamily, SaddleNodeData, center_reduction, flow_box,
                     saddle_node_data, v_reduce)
from .zform import (NormalFormData, ZFormFamily, euler_potential, lemma51_step, reduce_13,
                    reduce_to_zform, verify_14)

__all__ = ["ANormalForm", "CasimirFamily", "EigenPair", "NFamilyNormalForm", "NormalFormData",
           "PlanarFamily", "SaddleNodeData", "ZFormFamily", "a_casimir", "a_normal_form",
           "casimir_profile", "center_reduction", "euler_potential", "flow_box",
           "lemma51_step", "n_reduce", "reduce_13", "reduce_to_zform", "saddle_node_data",
           "solve_casimir_ansatz", "split_morse", "v_reduce", "verify_14"]
