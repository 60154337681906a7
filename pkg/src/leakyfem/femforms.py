"""Assembly of the quadratic forms for the two surface couplings.

Both operators share the Dirichlet energy; they differ in the interface
term.  The "delta" form lives on the continuous space and subtracts a
weighted trace mass,

    a_delta[u]      = int |grad u|^2  -  int_Sigma alpha |u|^2,

while the "delta-prime" form lives on the broken space and penalizes the
jump across the interface,

    a_deltaprime[u] = int |grad u|^2  -  int_Sigma (1/beta) |u_1 - u_2|^2.

All integrals of products of linear basis functions are evaluated in
closed form, including the radial weight r used on meridian meshes, so
assembly is exact up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import DomainError
from .geometry import MaterialData, OMEGA2
from .meshing import (BROKEN, CONTINUOUS, DofMap, Mesh, build_dofs,
                      interface_quadrature)

DELTA = "delta"
DELTA_PRIME = "delta_prime"


@dataclass(frozen=True)
class AssembledForms:
    """Sparse symmetric matrices of both discrete forms on one mesh.

    K_cont / M_cont  stiffness and mass on the continuous space
    K_brok / M_brok  stiffness and mass on the broken space
    T_alpha          interface trace mass (continuous space)
    J_beta           interface jump mass (broken space)
    embed_map        broken dof -> continuous dof realizing the inclusion
    sign_omega2      -1 on broken dofs resolved to the Omega2 side
    """

    mesh: Mesh
    material: MaterialData
    continuous: DofMap
    broken: DofMap
    K_cont: sp.csr_matrix
    M_cont: sp.csr_matrix
    K_brok: sp.csr_matrix
    M_brok: sp.csr_matrix
    T_alpha: sp.csr_matrix
    J_beta: sp.csr_matrix
    embed_map: np.ndarray
    sign_omega2: np.ndarray

    @property
    def A_delta(self):
        return (self.K_cont - self.T_alpha).tocsr()

    @property
    def A_deltaprime(self):
        return (self.K_brok - self.J_beta).tocsr()

    def matrices(self, which):
        """(A, M) pencil for the requested operator."""
        if which == DELTA:
            return self.A_delta, self.M_cont
        if which == DELTA_PRIME:
            return self.A_deltaprime, self.M_brok
        raise DomainError(f"unknown operator kind {which!r}")


def _tri_geometry(mesh):
    p = mesh.nodes[mesh.triangles]
    x, y = p[:, :, 0], p[:, :, 1]
    bx = np.stack([x[:, 1] - x[:, 0], x[:, 2] - x[:, 0]], axis=1)
    by = np.stack([y[:, 1] - y[:, 0], y[:, 2] - y[:, 0]], axis=1)
    det = bx[:, 0] * by[:, 1] - bx[:, 1] * by[:, 0]
    area = 0.5 * det
    # gradients of the three hat functions
    gx = np.stack([(y[:, 1] - y[:, 2]), (y[:, 2] - y[:, 0]),
                   (y[:, 0] - y[:, 1])], axis=1) / det[:, None]
    gy = np.stack([(x[:, 2] - x[:, 1]), (x[:, 0] - x[:, 2]),
                   (x[:, 1] - x[:, 0])], axis=1) / det[:, None]
    return x, area, gx, gy


def _local_stiffness(mesh):
    x, area, gx, gy = _tri_geometry(mesh)
    Ke = (gx[:, :, None] * gx[:, None, :] + gy[:, :, None] * gy[:, None, :])
    Ke *= area[:, None, None]
    if mesh.radial_weight:
        Ke *= x.mean(axis=1)[:, None, None]  # int_T r = area * centroid radius
    return Ke


def _local_mass(mesh):
    x, area, _, _ = _tri_geometry(mesh)
    T = area.shape[0]
    Me = np.empty((T, 3, 3))
    if not mesh.radial_weight:
        Me[:] = area[:, None, None] / 12.0
        Me[:, [0, 1, 2], [0, 1, 2]] = area[:, None] / 6.0
        return Me
    # exact moments of r * phi_i * phi_j with r linear in the vertices
    r = x
    for i in range(3):
        for j in range(3):
            k = 3 - i - j if i != j else None
            if i == j:
                others = [m for m in range(3) if m != i]
                Me[:, i, i] = area * (r[:, i] / 10.0
                                      + (r[:, others[0]] + r[:, others[1]]) / 30.0)
            else:
                Me[:, i, j] = area * ((r[:, i] + r[:, j]) / 30.0 + r[:, k] / 60.0)
    return Me


def _scatter(local, dofs, ndof):
    """Accumulate (T, 3, 3) element blocks into a CSR matrix."""
    rows = np.repeat(dofs, 3, axis=1).ravel()
    cols = np.tile(dofs, (1, 3)).ravel()
    vals = local.reshape(local.shape[0], 9).ravel()
    keep = (rows >= 0) & (cols >= 0)
    A = sp.coo_matrix((vals[keep], (rows[keep], cols[keep])), shape=(ndof, ndof))
    return A.tocsr()


def _edge_scatter(blocks, dofs, ndof):
    """Accumulate (E, k, k) edge blocks into a CSR matrix."""
    k = dofs.shape[1]
    rows = np.repeat(dofs, k, axis=1).ravel()
    cols = np.tile(dofs, (1, k)).ravel()
    vals = blocks.reshape(blocks.shape[0], k * k).ravel()
    keep = (rows >= 0) & (cols >= 0)
    A = sp.coo_matrix((vals[keep], (rows[keep], cols[keep])), shape=(ndof, ndof))
    return A.tocsr()


def assemble(mesh: Mesh, material: MaterialData,
             continuous: DofMap | None = None, broken: DofMap | None = None,
             alpha_edges: np.ndarray | None = None,
             beta_edges: np.ndarray | None = None) -> AssembledForms:
    """Assemble stiffness, mass, trace, and jump matrices for one mesh.

    Parameters
    ----------
    mesh, material : the triangulation and per-segment strengths.
    continuous, broken : optional prebuilt dof maps.
    alpha_edges, beta_edges : optional per-interface-edge overrides of the
        segmentwise material values (length = number of interface edges).

    Raises DomainError for non-positive material values.
    """
    if mesh.iface_seg.size and material.n_segments() <= int(mesh.iface_seg.max()):
        raise DomainError("material carries fewer segments than the mesh")
    if continuous is None:
        continuous = build_dofs(mesh, CONTINUOUS)
    if broken is None:
        broken = build_dofs(mesh, BROKEN)

    quad = interface_quadrature(mesh, continuous, broken)
    alpha = material.alpha[quad.seg] if alpha_edges is None \
        else np.asarray(alpha_edges, dtype=float)
    beta = material.beta[quad.seg] if beta_edges is None \
        else np.asarray(beta_edges, dtype=float)
    if alpha.shape != quad.lengths.shape or beta.shape != quad.lengths.shape:
        raise DomainError("per-edge material overrides have the wrong length")
    if np.any(alpha <= 0) or np.any(beta <= 0):
        raise DomainError("alpha and beta must be positive on every edge")

    Ke = _local_stiffness(mesh)
    Me = _local_mass(mesh)
    K_cont = _scatter(Ke, continuous.tri_dofs, continuous.ndof)
    M_cont = _scatter(Me, continuous.tri_dofs, continuous.ndof)
    K_brok = _scatter(Ke, broken.tri_dofs, broken.ndof)
    M_brok = _scatter(Me, broken.tri_dofs, broken.ndof)

    # trace mass on the continuous space: alpha * edge mass
    Tblocks = alpha[:, None, None] * quad.edge_mass
    T_alpha = _edge_scatter(Tblocks, quad.cont_dofs, continuous.ndof)

    # jump mass on the broken space: (1/beta) * edge mass expanded with
    # signs +1 on the Omega1 copy and -1 on the Omega2 copy of each node
    E = quad.lengths.shape[0]
    jd = quad.brok_dofs.reshape(E, 4)          # [n1s1, n1s2, n2s1, n2s2]
    signs = np.array([1.0, -1.0, 1.0, -1.0])
    node_of = np.array([0, 0, 1, 1])
    Jblocks = np.empty((E, 4, 4))
    for a in range(4):
        for b in range(4):
            Jblocks[:, a, b] = (signs[a] * signs[b]
                                * quad.edge_mass[:, node_of[a], node_of[b]])
    Jblocks /= beta[:, None, None]
    J_beta = _edge_scatter(Jblocks, jd, broken.ndof)

    embed_map = np.full(broken.ndof, -1, dtype=np.int64)
    for nd_b, nd_c in ((broken.node_dof1, continuous.node_dof1),
                       (broken.node_dof2, continuous.node_dof1)):
        ok = nd_b >= 0
        embed_map[nd_b[ok]] = nd_c[ok]
    if np.any(embed_map < 0):
        raise DomainError("broken dof without a continuous counterpart")

    node_region = np.zeros(mesh.num_nodes, dtype=np.int8)
    node_region[mesh.triangles.ravel()] = np.repeat(mesh.tri_region, 3)
    sign = np.ones(broken.ndof)
    dup = broken.node_dof1 != broken.node_dof2
    sign[broken.node_dof2[dup]] = -1.0
    single = (~dup) & (broken.node_dof1 >= 0) & (node_region == OMEGA2)
    sign[broken.node_dof1[single]] = -1.0

    return AssembledForms(mesh=mesh, material=material, continuous=continuous,
                          broken=broken, K_cont=K_cont, M_cont=M_cont,
                          K_brok=K_brok, M_brok=M_brok, T_alpha=T_alpha,
                          J_beta=J_beta, embed_map=embed_map, sign_omega2=sign)


def form_value(forms: AssembledForms, which: str, u: np.ndarray) -> float:
    """Quadratic form value a[u, u] for the requested operator."""
    u = np.asarray(u, dtype=float)
    if which == DELTA:
        if u.shape != (forms.continuous.ndof,):
            raise DomainError("coefficient vector sized for the wrong space")
        return float(u @ (forms.K_cont @ u) - u @ (forms.T_alpha @ u))
    if which == DELTA_PRIME:
        if u.shape != (forms.broken.ndof,):
            raise DomainError("coefficient vector sized for the wrong space")
        return float(u @ (forms.K_brok @ u) - u @ (forms.J_beta @ u))
    raise DomainError(f"unknown operator kind {which!r}")


def embed(forms: AssembledForms, u_cont: np.ndarray) -> np.ndarray:
    """Inclusion of the continuous space into the broken space.

    Copies every continuous nodal value to both side copies, so the jump
    of the embedded vector vanishes on every interface edge.
    """
    u_cont = np.asarray(u_cont, dtype=float)
    if u_cont.shape != (forms.continuous.ndof,):
        raise DomainError("coefficient vector sized for the wrong space")
    return u_cont[forms.embed_map]


def apply_U(forms: AssembledForms, u_brok: np.ndarray) -> np.ndarray:
    """Unitary sign flip on the Omega2 component (an involution)."""
    u_brok = np.asarray(u_brok, dtype=float)
    if u_brok.shape != (forms.broken.ndof,):
        raise DomainError("coefficient vector sized for the wrong space")
    return forms.sign_omega2 * u_brok


def borderline_identity_check(forms: AssembledForms, u_cont: np.ndarray) -> float:
    """a_deltaprime[U embed(u)] - a_delta[u].

    With beta = 4/alpha on every edge the jump of U embed(u) is twice the
    trace, so (1/beta)(2u)^2 = alpha u^2 per edge and the residual is zero
    up to rounding; with beta < 4/alpha somewhere it is strictly negative
    whenever u has a nonzero trace there.
    """
    w = apply_U(forms, embed(forms, u_cont))
    return form_value(forms, DELTA_PRIME, w) - form_value(forms, DELTA, u_cont)


def symmetry_error(A) -> float:
    """max |A - A^T| / max |A|, zero for exactly symmetric matrices."""
    d = abs(A - A.T)
    amax = abs(A).max() if A.nnz else 0.0
    if amax == 0.0:
        return 0.0
    return float(d.max() / amax)


def write_matrix_market(path, A, comment=""):
    """Dump a sparse symmetric matrix in MatrixMarket coordinate format."""
    scipy.io.mmwrite(str(path), sp.coo_matrix(A), comment=comment,
                     symmetry="symmetric")


def read_matrix_market(path):
    return sp.csr_matrix(scipy.io.mmread(str(path)))
