"""Quasi-static equilibrium of the spring-loaded, tendon-driven hand.

The posture at rest minimizes the torsional spring energy. Pulling tendons
adds work terms; contact adds non-penetration constraints. Both actuation
modes reduce to one convex program over the joint angles theta (box
constrained by the joint limits):

* tension mode: minimize  1/2 (theta-rest)' K (theta-rest) - tau'(theta-rest)
  with tau = A' T the constant tendon torques, subject to gap_c(theta) >= 0.
* excursion mode: minimize the spring energy subject to the inextensible
  cables, excursion_t(theta) >= commanded_t, and gap_c(theta) >= 0. A taut
  cable holds its constraint with equality and its Lagrange multiplier is
  the cable tension (pull-only, so multipliers are nonnegative); a finger
  pushed beyond the command leaves the cable slack at zero tension.

The solver is projected-gradient descent on an augmented Lagrangian
(Barzilai-Borwein steps, Armijo backtracking, joint limits by clamping),
followed by an active-set Newton polish that solves the KKT system exactly
on the identified constraint set. Contact forces are the constraint
multipliers of the touching pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .contact_world import Contact, ContactWorld, FKState, fk_gaps, forward_kinematics
from .hand_model import HandModel, Posture
from .tendon_geometry import tendon_arm_matrix

TENSION = "tension"
EXCURSION = "excursion"

MAX_ITERATIONS = 10_000
RELATIVE_TOLERANCE = 1e-8
# Pairs closer than this report a contact in results.
CONTACT_REPORT_TOL = 1e-6
# Caps keeping the descent from tunneling through objects: single moves stay
# small, and accepted iterates never penetrate deeper than the cap (or deeper
# than they already started, for bad warm starts).
_STEP_CAP_RAD = 0.1
_PEN_CAP_MM = 2.0


class SolverError(RuntimeError):
    pass


class InfeasibleExcursionError(ValueError):
    """A commanded excursion exceeds what the joint limits allow."""

    def __init__(self, tendon: str, commanded: float, attainable: float):
        self.tendon = tendon
        super().__init__(
            f"tendon {tendon!r}: commanded excursion {commanded:.3f} mm exceeds "
            f"the {attainable:.3f} mm attainable at the joint limits"
        )


@dataclass(frozen=True)
class ActuationCommand:
    """Per-tendon command: newtons in tension mode, millimeters in excursion mode."""

    mode: str
    values: np.ndarray

    def __post_init__(self):
        if self.mode not in (TENSION, EXCURSION):
            raise ValueError(f"unknown actuation mode {self.mode!r}")
        arr = np.asarray(self.values, dtype=float).copy()
        if not np.all(np.isfinite(arr)):
            raise ValueError("actuation values must be finite")
        if self.mode == TENSION and np.any(arr < 0):
            raise ValueError("tendon tensions must be >= 0 (tendons pull only)")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @staticmethod
    def tension(values) -> "ActuationCommand":
        return ActuationCommand(TENSION, np.asarray(values, float))

    @staticmethod
    def excursion(values) -> "ActuationCommand":
        return ActuationCommand(EXCURSION, np.asarray(values, float))


@dataclass(frozen=True)
class EquilibriumResult:
    posture: Posture
    tendon_tensions: np.ndarray  # N per tendon
    contacts: tuple[Contact, ...]
    contact_forces: np.ndarray  # N per contact, aligned with `contacts`
    converged: bool
    iterations: int
    residual: float  # projected KKT gradient / (1 + |energy|)
    energy: float  # N*mm at the solution


@dataclass(frozen=True)
class GripForceReport:
    """Contact normal forces plus the pinch force between opposing groups."""

    per_contact: np.ndarray
    pinch_force: float
    opposition_axis: np.ndarray


def potential_energy(model: HandModel, posture: Posture, command: ActuationCommand) -> float:
    """Spring energy minus tendon work, N*mm. Defined for tension mode only."""
    if command.mode != TENSION:
        raise ValueError("potential_energy is defined for tension-mode commands")
    if len(posture) != model.dof:
        raise ValueError(
            f"posture has {len(posture)} entries, model has {model.dof} axes"
        )
    if command.values.shape[0] != len(model.tendons):
        raise ValueError(
            f"command has {command.values.shape[0]} tendon values, model has "
            f"{len(model.tendons)} tendons"
        )
    k = model.stiffness_array()
    d = posture.angles - model.rest_rad()
    A = tendon_arm_matrix(model)
    spring = 0.5 * float(k @ d**2)
    work = float(command.values @ (A @ d))
    return spring - work


# ---------------------------------------------------------------------------
# Internal solver
# ---------------------------------------------------------------------------


@dataclass
class _Problem:
    model: HandModel
    k: np.ndarray
    rest: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    tau: np.ndarray  # constant torque, N*mm (tension mode; zero otherwise)
    A: np.ndarray  # (tendons x axes) arm matrix, mm
    exc_cmd: Optional[np.ndarray]  # commanded excursions, mm, or None
    world: Optional[ContactWorld]

    def objective(self, theta: np.ndarray) -> float:
        d = theta - self.rest
        return 0.5 * float(self.k @ d**2) - float(self.tau @ d)

    def objective_grad(self, theta: np.ndarray) -> np.ndarray:
        return self.k * (theta - self.rest) - self.tau


class _Gaps:
    """Gap values and gradients of every (capsule, object) pair at one posture."""

    def __init__(self, problem: _Problem, theta: np.ndarray):
        self.fk: FKState = forward_kinematics(problem.model, Posture(theta))
        self.pairs: list[tuple[int, int]] = []  # (capsule index, object index)
        gaps, normals, witnesses, surfaces = [], [], [], []
        world = problem.world
        if world is not None and world.objects:
            n_caps = len(self.fk.names)
            for oi, obj in enumerate(world.objects):
                g, cp, n, seg = fk_gaps(self.fk, obj)
                self.pairs.extend((ci, oi) for ci in range(n_caps))
                gaps.append(g)
                normals.append(n)
                witnesses.append(seg)
                surfaces.append(cp)
        if gaps:
            self.gap = np.concatenate(gaps)
            self.normal = np.vstack(normals)
            self.witness = np.vstack(witnesses)  # on the capsule axis
            self.surface = np.vstack(surfaces)  # on the object surface
        else:
            self.gap = np.zeros(0)
            self.normal = np.zeros((0, 3))
            self.witness = np.zeros((0, 3))
            self.surface = np.zeros((0, 3))

    def gradient_row(self, pair_index: int, dof: int) -> np.ndarray:
        """d(gap)/d(theta): normal velocity of the witness point per axis."""
        ci, _ = self.pairs[pair_index]
        row = np.zeros(dof)
        p = self.witness[pair_index]
        n = self.normal[pair_index]
        for ai in self.fk.ancestors[ci]:
            w = self.fk.axis_dir[ai]
            o = self.fk.axis_origin[ai]
            row[ai] = n @ np.cross(w, p - o)
        return row


def _al_penalty(c: np.ndarray, lam: np.ndarray, mu: float) -> float:
    """Rockafellar augmented-Lagrangian term for constraints c >= 0."""
    m = np.maximum(0.0, lam - mu * c)
    return float(np.sum(m**2 - lam**2)) / (2.0 * mu)


def _projected_residual(theta, grad, lo, hi) -> float:
    fixed = hi - lo <= 1e-15
    at_lo = theta <= lo + 1e-12
    at_hi = theta >= hi - 1e-12
    r = np.where(at_lo, np.minimum(grad, 0.0), grad)
    r = np.where(at_hi, np.maximum(grad, 0.0), r)
    r = np.where(at_lo & at_hi, 0.0, r)
    r = np.where(fixed, 0.0, r)
    return float(np.max(np.abs(r))) if r.size else 0.0


def _solve(
    model: HandModel,
    command: ActuationCommand,
    world: Optional[ContactWorld] = None,
    initial: Optional[Posture] = None,
    fixed_axes: Optional[Mapping[int, float]] = None,
    tol: float = RELATIVE_TOLERANCE,
    max_iterations: int = MAX_ITERATIONS,
) -> EquilibriumResult:
    if command.values.shape[0] != len(model.tendons):
        raise ValueError(
            f"command has {command.values.shape[0]} tendon values, model has "
            f"{len(model.tendons)} tendons"
        )
    k = model.stiffness_array()
    rest = model.rest_rad()
    lo = model.lower_rad()
    hi = model.upper_rad()
    if fixed_axes:
        lo = lo.copy()
        hi = hi.copy()
        for ai, val in fixed_axes.items():
            lo[ai] = hi[ai] = val
    A = tendon_arm_matrix(model)

    if command.mode == TENSION:
        tau = A.T @ command.values
        exc_cmd = None
    else:
        tau = np.zeros(model.dof)
        exc_cmd = command.values
        # Feasibility against the joint limits (contact may still block later).
        attainable = np.sum(np.maximum(A * (lo - rest), A * (hi - rest)), axis=1)
        for t, tendon in enumerate(model.tendons):
            if exc_cmd[t] > attainable[t] + 1e-9:
                raise InfeasibleExcursionError(tendon.name, exc_cmd[t], attainable[t])

    has_world = world is not None and len(world.objects) > 0
    problem = _Problem(model, k, rest, lo, hi, tau, A, exc_cmd, world if has_world else None)

    # Free space, tension mode: the energy separates per axis.
    if not has_world and exc_cmd is None:
        theta = np.clip(rest + tau / k, lo, hi)
        grad = problem.objective_grad(theta)
        energy = problem.objective(theta)
        resid = _projected_residual(theta, grad, lo, hi) / (1.0 + abs(energy))
        return EquilibriumResult(
            posture=Posture(theta),
            tendon_tensions=command.values.copy(),
            contacts=(),
            contact_forces=np.zeros(0),
            converged=bool(resid <= tol),
            iterations=0,
            residual=resid,
            energy=energy,
        )

    # With contact, approach from the rest posture: the free-space optimum can
    # start deep inside an object and strand the descent on its far side.
    if initial is not None:
        theta0 = np.clip(initial.angles, lo, hi)
    elif has_world:
        theta0 = np.clip(rest, lo, hi)
    else:
        theta0 = np.clip(rest + tau / k, lo, hi)
    theta, lam_exc, lam_con, iters, gaps = _augmented_lagrangian(
        problem, theta0, tol, max_iterations
    )
    theta, lam_exc, lam_con, gaps, polished = _polish(
        problem, theta, lam_exc, lam_con
    )

    energy = problem.objective(theta)
    grad = problem.objective_grad(theta)
    if exc_cmd is not None:
        grad = grad - problem.A.T @ lam_exc
    for p in np.nonzero(lam_con > 0)[0]:
        grad = grad - lam_con[p] * gaps.gradient_row(p, model.dof)
    resid = _projected_residual(theta, grad, lo, hi) / (1.0 + abs(energy))

    feas_ok = True
    if gaps.gap.size:
        feas_ok &= bool(np.min(gaps.gap) >= -1e-6)
    if exc_cmd is not None:
        feas_ok &= bool(np.min(problem.A @ (theta - rest) - exc_cmd) >= -1e-8)
    converged = bool(resid <= tol and feas_ok)

    contacts: list[Contact] = []
    forces: list[float] = []
    w_objects = world.objects if has_world else ()
    for p, (ci, oi) in enumerate(gaps.pairs):
        if gaps.gap[p] <= CONTACT_REPORT_TOL or lam_con[p] > 1e-9:
            contacts.append(
                Contact(
                    link=gaps.fk.capsules[ci].name,
                    object=w_objects[oi].name,
                    point=gaps.surface[p],
                    normal=gaps.normal[p],
                    gap=float(gaps.gap[p]),
                )
            )
            forces.append(float(max(lam_con[p], 0.0)))

    if exc_cmd is not None:
        tensions = np.maximum(lam_exc, 0.0)
    else:
        tensions = command.values.copy()

    return EquilibriumResult(
        posture=Posture(theta),
        tendon_tensions=tensions,
        contacts=tuple(contacts),
        contact_forces=np.array(forces),
        converged=converged,
        iterations=iters,
        residual=resid,
        energy=energy,
    )


def _augmented_lagrangian(problem: _Problem, theta0, tol, max_iterations):
    n_exc = len(problem.model.tendons) if problem.exc_cmd is not None else 0
    gaps = _Gaps(problem, theta0)
    n_con = gaps.gap.size
    dof = problem.model.dof
    lam_exc = np.zeros(n_exc)
    lam_con = np.zeros(n_con)
    mu = 100.0
    theta = theta0.copy()
    total_iters = 0
    feas_prev = np.inf

    def eval_L(th, gp: Optional[_Gaps] = None):
        gp = gp if gp is not None else _Gaps(problem, th)
        L = problem.objective(th)
        if n_exc:
            c = problem.A @ (th - problem.rest) - problem.exc_cmd
            L += _al_penalty(c, lam_exc, mu)
        if gp.gap.size:
            L += _al_penalty(gp.gap, lam_con, mu)
        return L, gp

    def grad_and_curvature(th, gp: _Gaps):
        """AL gradient plus its Gauss-Newton Hessian (constraint curvature only)."""
        g = problem.objective_grad(th)
        H = np.diag(problem.k)
        if n_exc:
            c = problem.A @ (th - problem.rest) - problem.exc_cmd
            m = np.maximum(0.0, lam_exc - mu * c)
            g = g - problem.A.T @ m
            act = m > 0
            if np.any(act):
                Aa = problem.A[act]
                H = H + mu * (Aa.T @ Aa)
        if gp.gap.size:
            m = np.maximum(0.0, lam_con - mu * gp.gap)
            for p in np.nonzero(m > 0)[0]:
                row = gp.gradient_row(p, dof)
                g = g - m[p] * row
                H = H + mu * np.outer(row, row)
        return g, H

    for outer in range(60):
        L, gaps = eval_L(theta, gaps if total_iters else None)
        inner_tol = max(1e-11, 0.05 * tol * (1.0 + abs(L))) * (10.0 ** max(0, 2 - outer))
        for _ in range(80):
            if total_iters >= max_iterations:
                break
            total_iters += 1
            grad, H = grad_and_curvature(theta, gaps)
            if _projected_residual(theta, grad, problem.lo, problem.hi) <= inner_tol:
                break
            # Newton direction on the non-binding axes.
            binding = ((theta <= problem.lo + 1e-12) & (grad > 0)) | (
                (theta >= problem.hi - 1e-12) & (grad < 0)
            )
            d = np.zeros(dof)
            fr = ~binding
            if np.any(fr):
                try:
                    d[fr] = np.linalg.solve(H[np.ix_(fr, fr)], -grad[fr])
                except np.linalg.LinAlgError:
                    d[fr] = -grad[fr] / problem.k[fr]
            if not np.any(d):
                break
            pen_cur = float(np.max(-gaps.gap, initial=0.0)) if gaps.gap.size else 0.0
            pen_allow = max(pen_cur, _PEN_CAP_MM)
            alpha = 1.0
            move = float(np.max(np.abs(d)))
            if move > _STEP_CAP_RAD:
                # Keep single moves small enough not to jump across objects.
                alpha = _STEP_CAP_RAD / move
            accepted = False
            for _bt in range(30):
                cand = np.clip(theta + alpha * d, problem.lo, problem.hi)
                if not np.any(cand != theta):
                    break
                dL_pred = float(grad @ (cand - theta))
                Lc, gc = eval_L(cand)
                pen_cand = float(np.max(-gc.gap, initial=0.0)) if gc.gap.size else 0.0
                if Lc <= L + 1e-4 * dL_pred and pen_cand <= pen_allow:
                    accepted = True
                    break
                alpha *= 0.5
            if not accepted:
                break
            moved = float(np.max(np.abs(cand - theta)))
            theta, L, gaps = cand, Lc, gc
            if moved < 1e-13:
                break

        # Multiplier updates (capped: forces beyond this are unphysical and
        # only arise when a command is unreachable, e.g. blocked by contact).
        feas = 0.0
        if n_exc:
            c = problem.A @ (theta - problem.rest) - problem.exc_cmd
            lam_exc = np.minimum(np.maximum(0.0, lam_exc - mu * c), 1e6)
            feas = max(feas, float(np.max(np.maximum(-c, 0.0), initial=0.0)))
        if gaps.gap.size:
            lam_con = np.minimum(np.maximum(0.0, lam_con - mu * gaps.gap), 1e6)
            feas = max(feas, float(np.max(np.maximum(-gaps.gap, 0.0), initial=0.0)))
        if feas <= 1e-9 and outer >= 2:
            break
        # A command blocked by contact cannot become feasible: multipliers at
        # the cap with stagnant violation mean there is nothing left to gain.
        saturated = (n_exc and np.any(lam_exc >= 1e6)) or (
            gaps.gap.size and np.any(lam_con >= 1e6)
        )
        if saturated and feas > 0.9 * feas_prev and outer >= 4:
            break
        if feas > 0.25 * feas_prev:
            mu = min(mu * 4.0, 1e7)
        feas_prev = feas
        if total_iters >= max_iterations:
            break

    return theta, lam_exc, lam_con, total_iters, gaps


def _polish(problem: _Problem, theta, lam_exc, lam_con):
    """Damped Newton refinement of the KKT system on the active constraint set.

    The Newton matrix carries the constraint curvature (finite-differenced
    gap-gradient rows), which a plain sequential linearization lacks; without
    it the iteration can drift tangentially along curved contacts. Returns
    possibly-updated (theta, multipliers, gaps, success) and falls back to
    the inputs when the active set cannot be stabilized.
    """
    n = theta.shape[0]
    k, rest, lo, hi = problem.k, problem.rest, problem.lo, problem.hi
    A, exc_cmd = problem.A, problem.exc_cmd
    n_exc = len(lam_exc)
    fixed = hi - lo <= 1e-15
    fd_h = 1e-6

    theta = np.clip(theta.copy(), lo, hi)
    lam_exc = lam_exc.copy()
    lam_con = lam_con.copy()
    gaps = _Gaps(problem, theta)

    # Constraints enter the working set only with force or actual violation;
    # grazing zero-force touches must not be pinned to the surface.
    act_exc: set[int] = set()
    if n_exc:
        c = A @ (theta - rest) - exc_cmd
        act_exc = {t for t in range(n_exc) if lam_exc[t] > 1e-9 or c[t] < -1e-9}
    act_con = {
        p
        for p in range(gaps.gap.size)
        if (lam_con[p] > 1e-9 or gaps.gap[p] < -1e-9)
        and np.linalg.norm(gaps.gradient_row(p, n)) > 1e-6
    }
    at_lo = (theta <= lo + 1e-9) | fixed
    at_hi = (theta >= hi - 1e-9) | fixed

    def constraint_data(gp, th):
        tags = [("exc", t) for t in sorted(act_exc)] + [("con", p) for p in sorted(act_con)]
        if not tags:
            return tags, np.zeros((0, n)), np.zeros(0)
        rows, vals = [], []
        for tag, i in tags:
            if tag == "exc":
                rows.append(A[i])
                vals.append(float(A[i] @ (th - rest) - exc_cmd[i]))
            else:
                rows.append(gp.gradient_row(i, n))
                vals.append(float(gp.gap[i]))
        return tags, np.vstack(rows), np.array(vals)

    def lam_vector(tags):
        return np.array(
            [lam_exc[i] if tag == "exc" else lam_con[i] for tag, i in tags]
        )

    def kkt_residual(th, gp, tags, C, cvals, lamv):
        stat = k * (th - rest) - problem.tau
        if len(tags):
            stat = stat - C.T @ lamv
        free = ~(at_lo | at_hi)
        # Bound axes are handled by their own multipliers; measure their
        # stationarity only in the escaping direction.
        stat_meas = np.where(at_lo & ~fixed, np.minimum(stat, 0.0), stat)
        stat_meas = np.where(at_hi & ~fixed, np.maximum(stat_meas, 0.0), stat_meas)
        stat_meas = np.where(at_lo & at_hi, 0.0, stat_meas)
        return stat, stat_meas, float(
            max(
                np.max(np.abs(stat_meas[free])) if np.any(free) else 0.0,
                np.max(np.abs(cvals)) if cvals.size else 0.0,
            )
        )

    best = (theta.copy(), lam_exc.copy(), lam_con.copy(), gaps)
    best_norm = math.inf
    scale = 1e-11 * (1.0 + float(np.max(np.abs(problem.tau), initial=1.0)))

    for _round in range(50):
        tags, C, cvals = constraint_data(gaps, theta)
        lamv = lam_vector(tags)
        stat, stat_meas, fnorm = kkt_residual(theta, gaps, tags, C, cvals, lamv)
        free = ~(at_lo | at_hi)

        if fnorm < best_norm:
            best_norm = fnorm
            best = (theta.copy(), lam_exc.copy(), lam_con.copy(), gaps)

        # --- working-set management -----------------------------------
        changed = False
        # Release the most negative multiplier.
        if len(tags):
            worst_i = int(np.argmin(lamv))
            if lamv[worst_i] < -1e-9:
                tag, i = tags[worst_i]
                if tag == "exc":
                    act_exc.discard(i)
                    lam_exc[i] = 0.0
                else:
                    act_con.discard(i)
                    lam_con[i] = 0.0
                continue
        # Release wrongly-bound axes (multiplier sign test on stat).
        for j in range(n):
            if fixed[j]:
                continue
            if at_lo[j] and stat[j] < -1e-9:
                at_lo[j] = False
                changed = True
            elif at_hi[j] and stat[j] > 1e-9:
                at_hi[j] = False
                changed = True
        # Add violated constraints.
        if n_exc:
            c_all = A @ (theta - rest) - exc_cmd
            for t in range(n_exc):
                if t not in act_exc and c_all[t] < -1e-9:
                    act_exc.add(t)
                    changed = True
        for p in range(gaps.gap.size):
            if p not in act_con and gaps.gap[p] < -1e-9:
                if np.linalg.norm(gaps.gradient_row(p, n)) > 1e-6:
                    act_con.add(p)
                    changed = True
        if changed:
            continue

        if fnorm <= scale:
            return theta, lam_exc, lam_con, gaps, True

        # --- damped Newton step on the KKT system ---------------------
        m = len(tags)
        nf = int(np.sum(free))
        if nf == 0 and m == 0:
            break
        fidx = np.nonzero(free)[0]
        H = np.diag(k)[np.ix_(fidx, fidx)]
        con_tags = [(pos, i) for pos, (tag, i) in enumerate(tags) if tag == "con"]
        if con_tags and np.any(lamv != 0.0):
            # Curvature of the contact rows, one finite difference per axis.
            rows0 = {i: C[pos] for pos, i in con_tags}
            for col, j in enumerate(fidx):
                thp = theta.copy()
                thp[j] += fd_h
                gp = _Gaps(problem, thp)
                dcol = np.zeros(n)
                for pos, i in con_tags:
                    if lamv[pos] == 0.0:
                        continue
                    drow = (gp.gradient_row(i, n) - rows0[i]) / fd_h
                    dcol -= lamv[pos] * drow
                H[:, col] += dcol[fidx]
        Cf = C[:, fidx] if m else np.zeros((0, nf))
        J = np.zeros((nf + m, nf + m))
        J[:nf, :nf] = H
        if m:
            J[:nf, nf:] = -Cf.T
            J[nf:, :nf] = Cf
        F = np.concatenate([stat[fidx], cvals])
        try:
            delta = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            delta, *_ = np.linalg.lstsq(J, -F, rcond=1e-12)

        step = 1.0
        accepted = False
        for _ls in range(20):
            th_new = theta.copy()
            th_new[fidx] += step * delta[:nf]
            th_new = np.clip(th_new, lo, hi)
            gp_new = _Gaps(problem, th_new)
            lam_try = lamv + step * delta[nf:] if m else lamv
            tags2, C2, cvals2 = constraint_data(gp_new, th_new)
            _, _, fnorm_new = kkt_residual(th_new, gp_new, tags2, C2, cvals2, lam_try)
            if fnorm_new <= (1.0 - 1e-4 * step) * fnorm or fnorm_new <= scale:
                theta, gaps = th_new, gp_new
                for (tag, i), l in zip(tags, lam_try):
                    if tag == "exc":
                        lam_exc[i] = l
                    else:
                        lam_con[i] = l
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        at_lo = (theta <= lo + 1e-12) | fixed
        at_hi = (theta >= hi - 1e-12) | fixed

    theta, lam_exc, lam_con, gaps = best
    return theta, lam_exc, lam_con, gaps, False


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def equilibrium_tension(
    model: HandModel,
    command: ActuationCommand,
    world: Optional[ContactWorld] = None,
    initial: Optional[Posture] = None,
    fixed_axes: Optional[Mapping[int, float]] = None,
) -> EquilibriumResult:
    """Equilibrium posture under constant tendon tensions.

    Without contact this is the per-axis closed form
    theta_j = clamp(rest_j + sum_t T_t arm_tj / k_j, limits).
    """
    if command.mode != TENSION:
        raise ValueError("equilibrium_tension requires a tension-mode command")
    return _solve(model, command, world, initial, fixed_axes)


def equilibrium_excursion(
    model: HandModel,
    command: ActuationCommand,
    world: Optional[ContactWorld] = None,
    initial: Optional[Posture] = None,
    fixed_axes: Optional[Mapping[int, float]] = None,
) -> EquilibriumResult:
    """Equilibrium posture under commanded tendon excursions.

    Reported tendon tensions are the cable-constraint multipliers: positive
    where the cable is taut, zero where it is slack (including slack-side
    negative commands, whose constraints are never active).
    """
    if command.mode != EXCURSION:
        raise ValueError("equilibrium_excursion requires an excursion-mode command")
    return _solve(model, command, world, initial, fixed_axes)


def grip_normal_forces(result: EquilibriumResult) -> GripForceReport:
    """Contact normal forces and the pinch force between opposing contact groups.

    The opposition axis is the principal direction of the force-weighted
    normals; the pinch force is the smaller of the two opposing normal sums
    projected on it.
    """
    if not result.contacts:
        raise ValueError("equilibrium result carries no contacts")
    forces = result.contact_forces
    normals = np.stack([c.normal for c in result.contacts])
    M = (normals * forces[:, None]).T @ normals
    _, vecs = np.linalg.eigh(M)
    axis = vecs[:, -1]
    s = normals @ axis
    pos = float(np.sum(forces[s > 0] * s[s > 0]))
    neg = float(np.sum(forces[s < 0] * (-s[s < 0])))
    return GripForceReport(
        per_contact=forces.copy(), pinch_force=min(pos, neg), opposition_axis=axis
    )
