# -*- Mode:Python; indent-tabs-mode:nil; tab-width:4 -*-
#
# Copyright 2026 The orthofrac developers
#
# This program is free software; you can redistribute it and/or
# modify it under the terms of the GNU Lesser General Public
# License version 3 as published by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.

"""Staggered phase-field solver with adaptive quadtree refinement."""

import contextlib
import dataclasses
import logging
import math
import time
from collections import defaultdict
from collections.abc import Iterator, Sequence

import numpy as np
import numpy.typing as npt
import scipy.sparse
import scipy.sparse.linalg

from orthofrac import errors
from orthofrac.elements import MeshQuadrature, strain_operator
from orthofrac.io import RunWriter
from orthofrac.material import GradedMaterial, MaterialPointData
from orthofrac.mesh.quadtree import (
    ErrorMap,
    QuadtreeMesh,
    balance_2to1,
    build_initial,
    flag_by_error,
    refine,
)
from orthofrac.mesh.transfer import transfer_state
from orthofrac.models.config_model import (
    BoundaryConditions,
    MeshConfig,
    NeumannBC,
    PhaseFieldParams,
    SimulationConfig,
    SolverConfig,
)
from orthofrac.models.record_model import PhaseTimings, StepRecord
from orthofrac.phasefield import (
    degradation,
    hybrid_constraint,
    spectral_split,
    structural_tensor,
    update_history,
)
from orthofrac.recovery import CrackTracker, MlsRecovery
from orthofrac.state import SolutionState

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
IndexArray = npt.NDArray[np.intp]

__all__ = [
    "ConstrainedSystem",
    "DirichletData",
    "Discretization",
    "PhaseTimer",
    "Simulation",
    "SimulationResult",
    "StepOutcome",
    "SolutionState",
    "StaggeredResult",
    "apply_dirichlet",
    "assemble_elasticity",
    "assemble_phasefield",
    "dirichlet_data",
    "reaction_force",
    "run_simulation",
    "solve_linear",
    "staggered_step",
    "traction_load",
]


class PhaseTimer:
    """Accumulates wall time per named solver phase."""

    def __init__(self) -> None:
        self._totals: dict[str, float] = defaultdict(float)

    @contextlib.contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self._totals[name] += time.perf_counter() - start

    def snapshot(self) -> PhaseTimings:
        return PhaseTimings(**self._totals)


@dataclasses.dataclass(frozen=True)
class Discretization:
    """A mesh with its quadrature and the material sampled at every point."""

    mesh: QuadtreeMesh
    quadrature: MeshQuadrature
    material: MaterialPointData
    theta: float

    @classmethod
    def build(
        cls, mesh: QuadtreeMesh, material: GradedMaterial, mesh_config: MeshConfig
    ) -> "Discretization":
        quadrature = MeshQuadrature.build(
            mesh, quad_order=mesh_config.quad_order, triangle_order=mesh_config.triangle_order
        )
        return cls(
            mesh=mesh,
            quadrature=quadrature,
            material=material.sample(quadrature.points),
            theta=material.theta,
        )


@dataclasses.dataclass(frozen=True)
class DirichletData:
    """Constrained displacement dofs of one load level.

    :ivar dofs: constrained dofs, sorted.
    :ivar values: prescribed values (mm).
    :ivar loaded: dofs following the applied displacement.
    """

    dofs: IndexArray
    values: FloatArray
    loaded: IndexArray


@dataclasses.dataclass(frozen=True)
class ConstrainedSystem:
    """A linear system reduced by eliminating prescribed unknowns.

    ``K_ff u_f = f_f - K_fc u_c``; the full matrix and load are kept so that
    reactions ``K u - f`` can be recovered.
    """

    matrix: scipy.sparse.csr_matrix
    rhs: FloatArray
    free: IndexArray
    fixed: IndexArray
    values: FloatArray
    reduced_matrix: scipy.sparse.csc_matrix
    reduced_rhs: FloatArray

    def expand(self, free_values: npt.ArrayLike) -> FloatArray:
        """Return the full solution vector."""
        full = np.zeros(len(self.rhs))
        full[self.free] = free_values
        full[self.fixed] = self.values
        return full

    def reactions(self, solution: npt.ArrayLike) -> FloatArray:
        """Return ``K u - f``; non-zero only on constrained unknowns at equilibrium."""
        return self.matrix @ np.asarray(solution) - self.rhs


@dataclasses.dataclass(frozen=True)
class StaggeredResult:
    """Outcome of the staggered iteration at one load level."""

    state: SolutionState
    iterations: int
    converged: bool
    residual: float
    reaction: float


def _scatter(
    blocks: Sequence[tuple[FloatArray, IndexArray]], size: int
) -> scipy.sparse.csr_matrix:
    """Sum element matrices into a symmetric sparse matrix."""
    rows, cols, values = [], [], []
    for local, dofs in blocks:
        rows.append(np.broadcast_to(dofs[:, :, None], local.shape).ravel())
        cols.append(np.broadcast_to(dofs[:, None, :], local.shape).ravel())
        values.append(local.ravel())
    matrix = scipy.sparse.coo_matrix(
        (np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
    ).tocsr()
    return 0.5 * (matrix + matrix.T).tocsr()


def traction_load(mesh: QuadtreeMesh, neumann: Sequence[NeumannBC]) -> FloatArray:
    """Consistent nodal forces of constant edge tractions."""
    force = np.zeros(mesh.n_dofs)
    for condition in neumann:
        segments = mesh.boundary_segments(condition.edge)
        if not len(segments):
            continue
        lengths = np.linalg.norm(
            mesh.nodes[segments[:, 1]] - mesh.nodes[segments[:, 0]], axis=1
        )
        for component, traction in enumerate(condition.traction):
            share = 0.5 * traction * lengths
            np.add.at(force, 2 * segments[:, 0] + component, share)
            np.add.at(force, 2 * segments[:, 1] + component, share)
    return force


def assemble_elasticity(
    disc: Discretization,
    phi: npt.ArrayLike,
    params: PhaseFieldParams,
    neumann: Sequence[NeumannBC] = (),
) -> tuple[scipy.sparse.csr_matrix, FloatArray]:
    """Assemble ``K_uu = sum int g(phi) B^T D B`` and the traction load."""
    phi = np.asarray(phi, dtype=np.float64)
    blocks = []
    for block in disc.quadrature.blocks:
        phi_points = np.einsum("eqm,em->eq", block.n, phi[block.conn])
        factor = degradation(phi_points, params.k_p) * block.weights
        b = strain_operator(block.dn)
        d = disc.material.d[block.qp_index]
        local = np.einsum("eqki,eqkl,eqlj,eq->eij", b, d, b, factor)
        blocks.append((local, block.dofs))
    return _scatter(blocks, disc.mesh.n_dofs), traction_load(disc.mesh, neumann)


def assemble_phasefield(
    disc: Discretization, history: npt.ArrayLike, params: PhaseFieldParams
) -> tuple[scipy.sparse.csr_matrix, FloatArray]:
    """Assemble the phase-field system.

    ``K = sum int Bphi^T (Gc l A) Bphi + N^T (Gc/l + 2H) N`` and
    ``f = sum int N^T 2H``.
    """
    assert params.ell0 is not None
    history = np.asarray(history, dtype=np.float64)
    ell = params.ell0
    tensor = structural_tensor(disc.theta, params.beta_penalty)
    blocks = []
    load = np.zeros(disc.mesh.n_nodes)
    for block in disc.quadrature.blocks:
        gc = disc.material.gc[block.qp_index]
        h = history[block.qp_index]
        w = block.weights
        local = np.einsum("eqai,ij,eqbj,eq->eab", block.dn, tensor, block.dn, gc * ell * w)
        local += np.einsum("eqa,eqb,eq->eab", block.n, block.n, (gc / ell + 2.0 * h) * w)
        blocks.append((local, block.conn))
        np.add.at(load, block.conn, np.einsum("eqa,eq->ea", block.n, 2.0 * h * w))
    return _scatter(blocks, disc.mesh.n_nodes), load


def dirichlet_data(
    mesh: QuadtreeMesh, boundary: BoundaryConditions, applied: float
) -> DirichletData:
    """Collect the constrained dofs at applied displacement ``applied``.

    :raises errors.BoundaryConditionError: for a point away from every node or
        conflicting values on one dof.
    """
    prescribed: dict[int, float] = {}
    loaded: set[int] = set()
    tolerance = 1e-9 * mesh.root_size
    for condition in boundary.dirichlet:
        if condition.edge is not None:
            nodes = mesh.boundary_nodes(condition.edge)
        else:
            assert condition.point is not None
            gap = np.linalg.norm(mesh.nodes - np.asarray(condition.point), axis=1)
            nodes = np.flatnonzero(gap <= tolerance)
            if not len(nodes):
                raise errors.BoundaryConditionError(
                    f"No mesh node at {condition.point}.",
                    resolution="Place point constraints on cell corners.",
                )
        component = 0 if condition.component == "x" else 1
        value = applied if condition.loaded else condition.value
        for node in nodes:
            dof = 2 * int(node) + component
            if dof in prescribed and not math.isclose(prescribed[dof], value):
                raise errors.BoundaryConditionError(
                    f"Conflicting values {prescribed[dof]} and {value} on dof {dof}."
                )
            prescribed[dof] = value
            if condition.loaded:
                loaded.add(dof)

    dofs = np.array(sorted(prescribed), dtype=np.intp)
    return DirichletData(
        dofs=dofs,
        values=np.array([prescribed[dof] for dof in dofs], dtype=np.float64),
        loaded=np.array(sorted(loaded), dtype=np.intp),
    )


def apply_dirichlet(
    matrix: scipy.sparse.spmatrix,
    rhs: npt.ArrayLike,
    dofs: npt.ArrayLike,
    values: npt.ArrayLike,
) -> ConstrainedSystem:
    """Eliminate prescribed unknowns, keeping the reduced system symmetric.

    :raises errors.BoundaryConditionError: for an unknown id or repeated ids.
    """
    matrix = scipy.sparse.csr_matrix(matrix)
    rhs = np.asarray(rhs, dtype=np.float64)
    fixed = np.asarray(dofs, dtype=np.intp).reshape(-1)
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    size = len(rhs)
    if np.any((fixed < 0) | (fixed >= size)):
        raise errors.BoundaryConditionError(
            f"Prescribed unknown out of range 0..{size - 1}: {fixed.tolist()}."
        )
    if len(np.unique(fixed)) != len(fixed):
        raise errors.BoundaryConditionError("An unknown is prescribed twice.")

    free_mask = np.ones(size, dtype=bool)
    free_mask[fixed] = False
    free = np.flatnonzero(free_mask)
    coupling = matrix[free][:, fixed]
    return ConstrainedSystem(
        matrix=matrix,
        rhs=rhs,
        free=free,
        fixed=fixed,
        values=values,
        reduced_matrix=matrix[free][:, free].tocsc(),
        reduced_rhs=rhs[free] - coupling @ values,
    )


def solve_linear(system: ConstrainedSystem, config: SolverConfig) -> FloatArray:
    """Solve a constrained system and return the full solution vector."""
    if not len(system.free):
        return system.expand(np.zeros(0))
    if config.backend == "iterative":
        diagonal = system.reduced_matrix.diagonal()
        preconditioner = scipy.sparse.linalg.LinearOperator(
            system.reduced_matrix.shape, matvec=lambda x: x / diagonal
        )
        solution, info = scipy.sparse.linalg.cg(
            system.reduced_matrix,
            system.reduced_rhs,
            rtol=config.iterative_rtol,
            maxiter=10 * len(system.free),
            M=preconditioner,
        )
        if info == 0:
            return system.expand(solution)
        logger.warning("Conjugate gradients stopped with code %d; using a direct solve.", info)
    solution = scipy.sparse.linalg.splu(system.reduced_matrix).solve(system.reduced_rhs)
    return system.expand(solution)


def reaction_force(system: ConstrainedSystem, solution: npt.ArrayLike, loaded: IndexArray) -> float:
    """Sum of the reactions on the loaded unknowns (N)."""
    if not len(loaded):
        return 0.0
    return float(system.reactions(solution)[loaded].sum())


def tensile_energies(disc: Discretization, u: npt.ArrayLike) -> tuple[FloatArray, FloatArray]:
    """Return ``psi+`` and ``psi-`` at every quadrature point."""
    strains = disc.quadrature.strains(u)
    return spectral_split(strains, disc.material.lam, disc.material.mu)


def nodal_hybrid_constraint(
    quadrature: MeshQuadrature,
    psi_plus: FloatArray,
    psi_minus: FloatArray,
    phi: FloatArray,
) -> FloatArray:
    """Zero the phase field at nodes whose every adjacent point is compressive."""
    compressive = hybrid_constraint(psi_plus, psi_minus, 1.0) == 0.0
    adjacent = np.zeros(quadrature.n_nodes, dtype=np.intp)
    adjacent_compressive = np.zeros(quadrature.n_nodes, dtype=np.intp)
    for block in quadrature.blocks:
        all_compressive = compressive[block.qp_index].all(axis=1)
        adjacent += np.bincount(block.conn.ravel(), minlength=quadrature.n_nodes)
        adjacent_compressive += np.bincount(
            block.conn[all_compressive].ravel(), minlength=quadrature.n_nodes
        )
    constrained = (adjacent > 0) & (adjacent == adjacent_compressive)
    return np.where(constrained, 0.0, phi)


def staggered_step(
    disc: Discretization,
    state: SolutionState,
    dirichlet: DirichletData,
    config: SimulationConfig,
    *,
    timer: PhaseTimer | None = None,
) -> StaggeredResult:
    """Alternate displacement and phase-field solves until the phase field settles.

    Each iteration solves ``u`` at frozen ``phi``, raises the history to the
    new tensile energy, solves ``phi`` at frozen history, applies the hybrid
    constraint and clamps to [0, 1]. Iteration stops once
    ``max |phi_new - phi_old|`` is below the staggered tolerance.
    """
    timer = timer or PhaseTimer()
    schedule = config.schedule
    params = config.phasefield
    no_dofs = np.zeros(0, dtype=np.intp)

    phi = state.phi
    history = state.history
    u = state.u
    residual = math.inf
    iteration = 0
    system: ConstrainedSystem | None = None
    for iteration in range(1, schedule.max_staggered_iterations + 1):
        with timer.phase("assemble_u"):
            stiffness, load = assemble_elasticity(disc, phi, params, config.boundary.neumann)
            system = apply_dirichlet(stiffness, load, dirichlet.dofs, dirichlet.values)
        with timer.phase("solve_u"):
            u = solve_linear(system, config.solver)

        psi_plus, psi_minus = tensile_energies(disc, u)
        history = update_history(history, psi_plus)

        with timer.phase("assemble_phi"):
            phase_matrix, phase_load = assemble_phasefield(disc, history, params)
            phase_system = apply_dirichlet(phase_matrix, phase_load, no_dofs, no_dofs)
        with timer.phase("solve_phi"):
            phi_new = solve_linear(phase_system, config.solver)

        phi_new = nodal_hybrid_constraint(disc.quadrature, psi_plus, psi_minus, phi_new)
        phi_new = np.clip(phi_new, 0.0, 1.0)
        residual = float(np.max(np.abs(phi_new - phi), initial=0.0))
        phi = phi_new
        logger.debug("Staggered iteration %d: |dphi| = %.3e", iteration, residual)
        if residual < schedule.staggered_tolerance:
            break

    assert system is not None
    converged = residual < schedule.staggered_tolerance
    return StaggeredResult(
        state=SolutionState(u=u, phi=phi, history=history),
        iterations=iteration,
        converged=converged,
        residual=residual,
        reaction=reaction_force(system, u, dirichlet.loaded),
    )


@dataclasses.dataclass(frozen=True)
class StepOutcome:
    """An accepted load step before it is recorded."""

    disc: Discretization
    result: StaggeredResult
    applied: float
    cutbacks: int
    refinements: int
    error_map: ErrorMap | None


@dataclasses.dataclass
class SimulationResult:
    """Everything a finished run produced."""

    config: SimulationConfig
    records: list[StepRecord]
    disc: Discretization
    state: SolutionState
    tracker: CrackTracker


class Simulation:
    """Load stepping with adaptive refinement for one configuration.

    :param config: a configuration; derived defaults are resolved here.
    :param threads: worker threads of the error indicator.
    """

    def __init__(self, config: SimulationConfig, *, threads: int = 1) -> None:
        self.config = config.resolved()
        self.threads = threads
        self.material = GradedMaterial(
            self.config.material,
            self.config.gradation,
            self.config.phasefield.effective_lame,
        )
        self.tracker = CrackTracker(
            self.config.geometry.notch,
            spacing=self.config.finest_size,
            threshold=self.config.recovery.damage_threshold,
        )

    def initial_mesh(self, base_level: int | None = None) -> QuadtreeMesh:
        geometry = self.config.geometry
        mesh = build_initial(
            geometry.width,
            geometry.height,
            self.config.mesh.base_level if base_level is None else base_level,
            origin=geometry.origin,
            notch=geometry.notch,
        )
        return balance_2to1(mesh)

    def discretize(self, mesh: QuadtreeMesh) -> Discretization:
        return Discretization.build(mesh, self.material, self.config.mesh)

    def error_map(self, disc: Discretization, state: SolutionState) -> ErrorMap:
        recovery = MlsRecovery(disc.mesh, self.config.recovery, self.tracker.crack)
        return recovery.error_map(state.u, disc.quadrature, threads=self.threads)

    def _solve_increment(
        self,
        disc: Discretization,
        start: SolutionState,
        applied: float,
        step: int,
        timer: PhaseTimer,
    ) -> tuple[StaggeredResult, float, int]:
        schedule = self.config.schedule
        assert schedule.displacement_increment is not None
        increment = schedule.displacement_increment
        cutbacks = 0
        while True:
            target = applied + increment
            dirichlet = dirichlet_data(disc.mesh, self.config.boundary, target)
            result = staggered_step(disc, start, dirichlet, self.config, timer=timer)
            if result.converged:
                return result, target, cutbacks
            if cutbacks >= schedule.max_cutbacks:
                if schedule.on_nonconvergence == "fail":
                    raise errors.StaggeredConvergenceError(
                        step, result.iterations, result.residual
                    )
                logger.warning(
                    "Step %d accepted without convergence (residual %.3e).",
                    step,
                    result.residual,
                )
                return result, target, cutbacks
            cutbacks += 1
            increment *= 0.5
            logger.info("Step %d: halving the increment to %.4g.", step, increment)

    def advance(
        self,
        disc: Discretization,
        state: SolutionState,
        applied: float,
        step: int,
        timer: PhaseTimer,
        *,
        adaptive: bool | None = None,
    ) -> StepOutcome:
        """Solve one load step, refining and re-solving from the step start.

        The refinement loop stops when no element is flagged, when flagged
        cells are at the maximum depth, or after the allowed number of passes.
        """
        mesh_config = self.config.mesh
        adaptive = mesh_config.adaptive if adaptive is None else adaptive
        start = state
        passes = 0
        while True:
            result, target, cutbacks = self._solve_increment(disc, start, applied, step, timer)
            if not adaptive or passes >= mesh_config.max_refinement_passes:
                return StepOutcome(disc, result, target, cutbacks, passes, None)

            with timer.phase("error_indicator"):
                error_map = self.error_map(disc, result.state)
            flagged = {
                cell
                for cell in flag_by_error(error_map, mesh_config.error_tolerance)
                if cell.level < mesh_config.max_depth
            }
            if not flagged:
                return StepOutcome(disc, result, target, cutbacks, passes, error_map)

            with timer.phase("remeshing"):
                mesh = balance_2to1(refine(disc.mesh, flagged))
                refined = self.discretize(mesh)
                start = transfer_state(
                    disc.mesh,
                    start,
                    mesh,
                    old_quadrature=disc.quadrature,
                    new_quadrature=refined.quadrature,
                )
            passes += 1
            logger.info(
                "Step %d pass %d: split %d cells, now %d elements and %d dofs.",
                step,
                passes,
                len(flagged),
                mesh.n_elements,
                mesh.n_dofs,
            )
            disc = refined


def run_simulation(
    config: SimulationConfig,
    *,
    max_steps: int | None = None,
    threads: int = 1,
    write_output: bool = True,
) -> SimulationResult:
    """Run the load schedule, writing per-step artifacts as each step completes.

    :param max_steps: cap on the number of load steps.
    :param threads: worker threads of the error indicator.
    :param write_output: write VTK, CSV and metadata to the output directory.
    """
    simulation = Simulation(config, threads=threads)
    config = simulation.config
    disc = simulation.discretize(simulation.initial_mesh())
    state = SolutionState.zeros(disc.mesh.n_nodes, disc.quadrature.n_points)

    writer = RunWriter(config) if write_output else None
    if writer is not None:
        writer.write_metadata()
        writer.write_snapshot(0, disc.mesh, state, None)

    steps = config.schedule.steps if max_steps is None else min(max_steps, config.schedule.steps)
    applied = 0.0
    records: list[StepRecord] = []
    for step in range(1, steps + 1):
        timer = PhaseTimer()
        started = time.perf_counter()
        outcome = simulation.advance(disc, state, applied, step, timer)
        disc, state, applied = outcome.disc, outcome.result.state, outcome.applied
        simulation.tracker.update(disc.quadrature, state.phi)

        error_map = outcome.error_map
        snapshot = writer is not None and step % config.output.stride == 0
        if snapshot and error_map is None:
            error_map = simulation.error_map(disc, state)

        record = StepRecord(
            step=step,
            displacement=applied,
            reaction=outcome.result.reaction,
            dofs=disc.mesh.n_dofs,
            iterations=outcome.result.iterations,
            wall_time=time.perf_counter() - started,
            elements=disc.mesh.n_elements,
            converged=outcome.result.converged,
            cutbacks=outcome.cutbacks,
            refinements=outcome.refinements,
            global_error=None if error_map is None else error_map.global_error,
            timings=timer.snapshot(),
        )
        records.append(record)
        logger.info(
            "Step %d: u = %.4g mm, F = %.4g N, %d dofs, %d iterations.",
            step,
            applied,
            record.reaction,
            record.dofs,
            record.iterations,
        )
        if writer is not None:
            writer.write_records(records)
            if snapshot:
                writer.write_snapshot(step, disc.mesh, state, error_map)

    return SimulationResult(
        config=config, records=records, disc=disc, state=state, tracker=simulation.tracker
    )
