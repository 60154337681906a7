"""Shared plumbing: mesh families, assembly, and cascaded eigensolves.

Refinement families are nested by construction (red refinement), so
eigenvalues decrease level by level and the coarse-level spectrum gives a
safe, tight shift-invert pole for the next level.
"""

from __future__ import annotations

import numpy as np

from . import femforms, meshing
from .eigensolver import DEFAULT_SEED, DEFAULT_TOL, smallest_eigenpairs
from .errors import SolverError


def mesh_levels(geometry, h, refinements, inner_rings=None, min_angle=20.0):
    """Coarse mesh plus `refinements` nested red refinements."""
    meshes = [meshing.triangulate(geometry, h, min_angle_deg=min_angle,
                                  inner_rings=inner_rings)]
    for _ in range(refinements):
        meshes.append(meshing.refine_uniform(meshes[-1]))
    return meshes


def assemble_levels(meshes, material):
    return [femforms.assemble(m, material) for m in meshes]


def shift_from_previous(values):
    """Shift safely below the next (finer or larger-box) spectrum, assuming
    the new ground state does not drop by more than a margin."""
    lam1 = float(values[0])
    return lam1 - max(1.0, 0.5 * abs(lam1))


def solve_pencil(A, M, k, tol=DEFAULT_TOL, seed=DEFAULT_SEED, shift=None):
    """smallest_eigenpairs with a fallback when a guessed shift is too high."""
    if shift is not None:
        for _ in range(3):
            try:
                return smallest_eigenpairs(A, M, k, tol=tol, shift=shift,
                                           seed=seed)
            except SolverError:
                shift = 2.0 * shift - 1.0
    return smallest_eigenpairs(A, M, k, tol=tol, seed=seed)


def cascade_solve(forms_list, which, k, tol=DEFAULT_TOL, seed=DEFAULT_SEED):
    """Solve one operator on every refinement level, reusing the coarse
    spectrum as the shift for the finer levels."""
    results = []
    shift = None
    for forms in forms_list:
        A, M = forms.matrices(which)
        res = solve_pencil(A, M, k, tol=tol, seed=seed, shift=shift)
        results.append(res)
        shift = shift_from_previous(res.values)
    return results


def interior_dofs(forms, which, halfwidth):
    """Dofs whose node lies strictly inside the (inner) box of the given
    halfwidth; pinning the rest reproduces the smaller-box problem exactly
    when that box was constrained into the mesh as a ring."""
    mesh = forms.mesh
    dofmap = forms.continuous if which == femforms.DELTA else forms.broken
    tol = 1e-12 * max(np.abs(mesh.nodes).max(), 1.0)
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    if mesh.radial_weight:
        inside = (x < halfwidth - tol) & (np.abs(y) < halfwidth - tol)
    else:
        inside = (np.abs(x) < halfwidth - tol) & (np.abs(y) < halfwidth - tol)
    keep = []
    for nd in (dofmap.node_dof1, dofmap.node_dof2):
        ok = (nd >= 0) & inside
        keep.append(nd[ok])
    keep = np.unique(np.concatenate(keep))
    return keep


def solve_restricted(forms, which, halfwidth, k, tol=DEFAULT_TOL,
                     seed=DEFAULT_SEED, shift=None):
    """Solve the pencil restricted to dofs strictly inside an inner box."""
    A, M = forms.matrices(which)
    keep = interior_dofs(forms, which, halfwidth)
    Ar = A[keep][:, keep].tocsr()
    Mr = M[keep][:, keep].tocsr()
    return solve_pencil(Ar, Mr, k, tol=tol, seed=seed, shift=shift), keep
