"""Refinement studies: errors against references and observed orders."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import ConfigError, DivergedError
from .spectral import forward_transform, l2_norm, resample
from .stepping import run

__all__ = [
    "ErrorRow",
    "ErrorTable",
    "error_vs_reference",
    "convergence_order",
    "temporal_study",
    "spatial_study",
]


def _spectral(f):
    return f if hasattr(f, "coeffs") else forward_transform(f)


def error_vs_reference(result, reference):
    """L2 distance between two solutions, compared on the coarser band.

    Both arguments are single fields or equal-length sequences of fields
    (spectral or physical). The finer one is projected onto the coarser grid's
    modes before differencing; for several components the errors combine in
    quadrature.
    """
    a = (result,) if not isinstance(result, (tuple, list)) else tuple(result)
    b = (reference,) if not isinstance(reference, (tuple, list)) else tuple(reference)
    if len(a) != len(b):
        raise ConfigError(f"component count mismatch: {len(a)} vs {len(b)}")
    total = 0.0
    for x, y in zip(a, b):
        x, y = _spectral(x), _spectral(y)
        if not x.grid.same_domain(y.grid):
            raise ConfigError(f"incomparable grids {x.grid} and {y.grid}")
        coarse = x.grid if x.grid.n <= y.grid.n else y.grid
        total += l2_norm(resample(x, coarse) - resample(y, coarse)) ** 2
    return math.sqrt(total)


def convergence_order(errors, steps, space=False):
    """Observed orders between successive refinements.

    In time ``log(e[i-1]/e[i]) / log(s[i-1]/s[i])``; in space (``space=True``,
    ``steps`` are grid sizes) ``log(e[i-1]/e[i]) / log(N[i]/N[i-1])``. A pair
    involving a zero error is saturated and reported as ``None``.
    """
    if len(errors) != len(steps) or len(errors) < 2:
        raise ConfigError("need at least two (error, step) pairs of equal count")
    orders = []
    for i in range(1, len(errors)):
        e0, e1 = errors[i - 1], errors[i]
        s0, s1 = steps[i - 1], steps[i]
        if s0 == s1:
            raise ConfigError("refinement steps must differ")
        if e0 == 0 or e1 == 0:
            orders.append(None)
            continue
        ratio = s1 / s0 if space else s0 / s1
        orders.append(math.log(e0 / e1) / math.log(ratio))
    return orders


@dataclass
class ErrorRow:
    step: float
    error: float
    order: object = None
    status: str = "ok"


@dataclass
class ErrorTable:
    """Rows of ``(tau or N, error, order)`` plus run metadata."""

    kind: str
    rows: list
    metadata: dict = field(default_factory=dict)

    def to_csv(self):
        lines = [f"# {k}={v}" for k, v in self.metadata.items()]
        lines.append(f"{self.kind},error,order,status")
        for r in self.rows:
            step = f"{r.step:.17g}" if self.kind == "tau" else str(int(r.step))
            err = f"{r.error:.17g}" if math.isfinite(r.error) else "inf"
            if r.order is None:
                order = "saturated" if r.status == "saturated" else ""
            else:
                order = f"{r.order:.17g}"
            lines.append(f"{step},{err},{order},{r.status}")
        return "\n".join(lines) + "\n"

    @property
    def errors(self):
        return [r.error for r in self.rows]

    @property
    def orders(self):
        return [r.order for r in self.rows[1:]]


def _final(cfg, n=None, tau=None):
    model = cfg.build_model(n)
    summary = run(model, cfg.initial_fields(n), cfg.stepper(tau=tau, snapshot_times=()))
    return summary.final


def _attempt(fn):
    try:
        return fn(), None
    except DivergedError as exc:
        return None, exc


def _map(fn, items, workers):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _assemble(kind, steps, outcomes, reference_of, metadata, space):
    rows = []
    for s, (final, exc) in zip(steps, outcomes):
        if exc is not None:
            rows.append(ErrorRow(s, math.inf, None, "unstable"))
        else:
            rows.append(ErrorRow(s, error_vs_reference(final, reference_of(s)), None))
    for i in range(1, len(rows)):
        prev, cur = rows[i - 1], rows[i]
        if prev.status == "unstable" or cur.status == "unstable":
            continue
        (order,) = convergence_order([prev.error, cur.error], [prev.step, cur.step], space=space)
        cur.order = order
        if order is None:
            cur.status = "saturated"
    return ErrorTable(kind, rows, metadata)


def _metadata(cfg, **extra):
    md = {"model": cfg.model, "alpha": cfg.alpha, "kappa": cfg.kappa, "t_end": cfg.t_end}
    md.update(extra)
    return md


def temporal_study(cfg, taus=None):
    """Errors at ``t_end`` for each step size, against ``cfg.reference``.

    Reference ``tau`` uses a run at ``cfg.tau_ref`` on the same grid;
    ``exact`` uses the manufactured solution.
    """
    taus = tuple(cfg.taus if taus is None else taus)
    if not taus:
        raise ConfigError("temporal_study needs at least one tau")
    if list(taus) != sorted(taus, reverse=True):
        raise ConfigError("taus must be sorted from coarse to fine")
    if cfg.reference == "exact":
        ref = cfg.build_model().exact(cfg.t_end)
        meta_ref = "exact"
    elif cfg.reference == "tau":
        ref = _final(cfg, tau=cfg.tau_ref)
        meta_ref = f"tau_ref={cfg.tau_ref}"
    else:
        ref = _final(cfg, n=cfg.n_ref)
        meta_ref = f"n_ref={cfg.n_ref}"
    outcomes = _map(lambda t: _attempt(lambda: _final(cfg, tau=t)), taus, cfg.workers)
    return _assemble("tau", taus, outcomes, lambda s: ref, _metadata(cfg, n=cfg.n, reference=meta_ref), space=False)


def spatial_study(cfg, ns=None):
    """Errors at ``t_end`` for each grid size at fixed ``cfg.tau``."""
    ns = tuple(cfg.ns if ns is None else ns)
    if not ns:
        raise ConfigError("spatial_study needs at least one n")
    if list(ns) != sorted(ns):
        raise ConfigError("ns must be sorted from coarse to fine")
    if cfg.reference == "exact":
        reference_of = lambda n: cfg.build_model(n).exact(cfg.t_end)
        meta_ref = "exact"
    elif cfg.reference == "n":
        ref = _final(cfg, n=cfg.n_ref)
        reference_of = lambda n: ref
        meta_ref = f"n_ref={cfg.n_ref}"
    else:
        raise ConfigError("spatial_study needs reference = n or exact")
    outcomes = _map(lambda n: _attempt(lambda: _final(cfg, n=n)), ns, cfg.workers)
    return _assemble("n", ns, outcomes, reference_of, _metadata(cfg, tau=cfg.tau, reference=meta_ref), space=True)
