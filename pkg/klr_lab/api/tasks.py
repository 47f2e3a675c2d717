# klr_lab/api/tasks.py

import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Tuple

from klr_lab.core.config import settings
from klr_lab.core.errors import ConfigError, KLRLabError, PreconditionError
from klr_lab.models.job import JobConfig, resolve_label
from klr_lab.models.report import ClaimReport, RunReport, RunSummary, Verdict, claim, observation
from klr_lab.services.cartan import (
    CartanDatum, DominantWeight, RootElement, instance_label, is_pure_power, multiplicity_free_roots,
    weight_grid,
)
from klr_lab.services.cocenter import (
    check_cocenter_basis, check_commutator_generators, check_leading_terms, check_reduce_consistent,
    cocenter_basis, conjecture_verify, default_order, iota_check,
)
from klr_lab.services.cyclotomic import (
    CyclotomicContext, annihilator_check, check_biweight_dimension, check_cap_formula, check_center,
    check_generators, check_ideal_basis, check_structure, check_trace, check_z_central, nilhecke_dimension,
)
from klr_lab.services.klr import KLRAlgebra
from klr_lab.services.polynomials import scalar_domain, serialize_poly
from klr_lab.services.symgroup import GammaOrder

logger = logging.getLogger(__name__)

# Result of one task on one instance: (claims, verdicts, task data)
Outcome = Tuple[List[ClaimReport], List[Verdict], Dict[str, Any]]


class Instance:
    """A resolved (datum, Lambda, beta) with the field and height bound of its job."""

    def __init__(self, job: JobConfig, lam_map: Optional[Dict[str, int]] = None, beta_map: Optional[Dict[str, int]] = None):
        self.job = job
        self.datum: CartanDatum = job.cartan.to_datum()
        lam_map = job.lambda_ if lam_map is None else lam_map
        beta_map = job.beta if beta_map is None else beta_map
        self.lam = DominantWeight.from_map(self.datum, {self.label_of(k): v for k, v in lam_map.items()})
        self.beta = RootElement.from_map(self.datum, {self.label_of(k): v for k, v in beta_map.items()})
        if self.beta.height == 0:
            raise ConfigError("beta must be a nonzero multiplicity map")
        options = job.options
        self.domain = scalar_domain(
            options.scalar_field or settings.SCALAR_FIELD,
            settings.PRIME if options.prime is None else options.prime,
        )
        self.max_height = options.max_height or settings.MAX_HEIGHT
        self.label = instance_label(self.datum, self.beta, self.lam)

    def label_of(self, key):
        return resolve_label(self.datum, key)

    def sequence(self, values) -> Optional[tuple]:
        return None if values is None else tuple(self.label_of(v) for v in values)

    def klr(self) -> KLRAlgebra:
        return KLRAlgebra(self.datum, self.beta, self.domain, self.max_height)

    def context(self, target: Optional[tuple] = None) -> CyclotomicContext:
        return CyclotomicContext(self.datum, self.lam, self.beta, self.domain, target, max_height=self.max_height)

    def order(self) -> GammaOrder:
        gamma = self.sequence(self.job.gamma)
        return GammaOrder(gamma) if gamma else GammaOrder(self.beta.content())

    def labels_for_i(self) -> List:
        if self.job.i is not None:
            return [self.label_of(self.job.i)]
        return list(self.beta.support)


def require_multiplicity_free(instance: Instance, task: str):
    if not instance.beta.is_multiplicity_free:
        raise PreconditionError(f"{task} needs multiplicity-free beta, got {instance.label}")


# -- task handlers ------------------------------------------------------------


def run_verify_relations(instance: Instance) -> Outcome:
    klr = instance.klr()
    reports = klr.verify_relations()
    reports.extend(klr.check_associativity())
    reports.append(klr.check_polyrep())
    return reports, [], {"sequences": [list(nu) for nu in klr.sequences]}


def run_biweight_basis(instance: Instance) -> Outcome:
    target = instance.sequence(instance.job.target) or instance.beta.content()
    nu = instance.sequence(instance.job.nu) or target
    ctx = instance.context(target)
    basis = ctx.biweight_basis(nu)
    reports = [check_generators(ctx)]
    if is_pure_power(instance.datum):
        reports.append(check_biweight_dimension(ctx, nu))
    generators = {str(t + 1): serialize_poly(ctx.g_generator(nu, t)) for t in range(ctx.n)}
    return reports, [], {"basis": basis.to_json(), "generators": generators}


def run_full_basis(instance: Instance) -> Outcome:
    ctx = instance.context()
    basis = ctx.full_basis()
    reports = [check_generators(ctx)]
    if instance.beta.is_multiplicity_free:
        reports.append(check_cap_formula(ctx))
        reports.append(check_ideal_basis(ctx))
    else:
        (i,) = instance.beta.support
        expected = nilhecke_dimension(instance.lam[i], instance.beta.height)
        reports.append(claim(ctx.label, "nilhecke-dimension", len(basis) == expected, size=len(basis), expected=expected))
    if is_pure_power(instance.datum) and ctx.n <= 3:
        for nu in ctx.klr.sequences:
            for target in ctx.special_targets():
                reports.append(check_biweight_dimension(ctx, nu, target))
    reports.extend(check_structure(ctx))
    A = ctx.structure_constants()
    return reports, [], {"basis": basis.to_json(), "graded_dimension": A.graded_dimension()}


def run_cocenter_basis(instance: Instance) -> Outcome:
    require_multiplicity_free(instance, "cocenter-basis")
    ctx = instance.context()
    order = instance.order()
    A = ctx.structure_constants()
    reports, basis, _ = check_cocenter_basis(ctx, order, A)
    reports.append(check_leading_terms(ctx, order))
    reports.extend(check_commutator_generators(ctx, order))
    reports.append(check_reduce_consistent(ctx, order, A))
    return reports, [], {"cocenter_basis": basis.to_json()}


def run_center_check(instance: Instance) -> Outcome:
    ctx = instance.context()
    if not instance.beta.is_multiplicity_free:
        reports, dim_center, dim_sym = check_center(ctx)
        return reports, [], {"dim_center": dim_center, "dim_sym_image": dim_sym}
    reports, verdict = conjecture_verify(ctx, instance.order())
    return reports, [verdict], {}


def run_annihilator_check(instance: Instance) -> Outcome:
    ctx = instance.context()
    reports = []
    for i in instance.labels_for_i():
        reports.extend(annihilator_check(ctx, i))
    return reports, [], {}


def run_trace_check(instance: Instance) -> Outcome:
    ctx = instance.context()
    A = ctx.structure_constants()
    reports = check_trace(ctx, A)
    reports.append(check_z_central(ctx, A))
    return reports, [], {"graded_dimension": A.graded_dimension()}


def run_iota_check(instance: Instance) -> Outcome:
    require_multiplicity_free(instance, "iota-check")
    ctx = instance.context()
    base = instance.order() if instance.job.gamma is not None else default_order(ctx)
    reports = [iota_check(ctx, base.rotated_to(i), i) for i in instance.labels_for_i()]
    return reports, [], {}


TASKS: Dict[str, Callable[[Instance], Outcome]] = {
    "verify-relations": run_verify_relations,
    "biweight-basis": run_biweight_basis,
    "full-basis": run_full_basis,
    "cocenter-basis": run_cocenter_basis,
    "center-check": run_center_check,
    "annihilator-check": run_annihilator_check,
    "trace-check": run_trace_check,
    "iota-check": run_iota_check,
}

# checks a sweep can run, and whether they need multiplicity-free beta
SWEEP_CHECKS = {
    "center-check": True,
    "annihilator-check": False,
    "iota-check": True,
    "trace-check": False,
    "cocenter-basis": True,
}


# -- reports ------------------------------------------------------------------


def summarize(task: str, instances: int, reports: List[ClaimReport], errors: Dict[str, str]) -> RunSummary:
    failed = sum(r.failed for r in reports)
    checked = sum(r.status != "info" for r in reports)
    return RunSummary(
        task=task, instances=instances, total_claims=checked,
        passed=checked - failed, failed=failed, errors=errors,
    )


def run_task(job: JobConfig) -> Tuple[RunReport, int]:
    """Run a job; returns the report and the exit status it implies."""
    if job.task == "sweep":
        return asyncio.run(run_sweep(job))
    instance = Instance(job)
    logger.info(f"Running {job.task} on {instance.label}")
    reports, verdicts, data = TASKS[job.task](instance)
    report = RunReport(
        summary=summarize(job.task, 1, reports, {}),
        reports=reports, verdicts=verdicts, data=data,
    )
    return report, 0 if report.ok else 1


def run_instance(payload: Dict[str, Any], lam_map: Dict[str, int], beta_map: Dict[str, int], checks: List[str], skip_zero: bool) -> Dict[str, Any]:
    """One sweep instance, with plain-data arguments and results so it can run in a worker process."""
    job = JobConfig.model_validate(payload)
    instance = Instance(job, lam_map, beta_map)
    reports: List[ClaimReport] = []
    verdicts: List[Verdict] = []
    if skip_zero and not len(instance.context().full_basis()):
        reports.append(observation(instance.label, "zero-quotient"))
    else:
        for check in checks:
            sub_reports, sub_verdicts, _ = TASKS[check](instance)
            reports.extend(sub_reports)
            verdicts.extend(sub_verdicts)
    return {
        "label": instance.label,
        "reports": [r.model_dump() for r in reports],
        "verdicts": [v.model_dump(by_alias=True) for v in verdicts],
    }


def sweep_instances(job: JobConfig) -> List[Tuple[Dict[str, int], Dict[str, int]]]:
    grid = job.sweep
    if grid is None:
        raise ConfigError("task=sweep needs a 'sweep' block")
    datum = job.cartan.to_datum()
    betas = [dict(b) for b in grid.betas]
    for height in grid.heights:
        betas.extend({str(i): k for i, k in beta.multiplicities} for beta in multiplicity_free_roots(datum, height))
    for check in grid.checks:
        if not SWEEP_CHECKS[check]:
            continue
        for beta_map in betas:
            beta = RootElement.from_map(datum, {resolve_label(datum, k): v for k, v in beta_map.items()})
            if not beta.is_multiplicity_free:
                raise PreconditionError(f"sweep check {check} needs multiplicity-free beta, got {beta.as_dict()}")
    out = []
    for lam in weight_grid(datum, grid.lambda_max):
        lam_map = {str(i): c for i, c in lam.coords}
        for beta_map in betas:
            out.append((lam_map, beta_map))
    return out


async def run_sweep(job: JobConfig) -> Tuple[RunReport, int]:
    instances = sweep_instances(job)
    payload = job.model_dump(by_alias=True)
    grid = job.sweep
    executor = (
        ProcessPoolExecutor(max_workers=settings.SWEEP_WORKERS)
        if settings.is_parallel_sweep else ThreadPoolExecutor(max_workers=1)
    )
    loop = asyncio.get_running_loop()

    # Build instance tasks
    tasks = []
    task_mapping = []
    for lam_map, beta_map in instances:
        tasks.append(loop.run_in_executor(
            executor, run_instance, payload, lam_map, beta_map, list(grid.checks), grid.skip_zero,
        ))
        task_mapping.append({"lambda": lam_map, "beta": beta_map})

    try:
        results = await asyncio.gather(*tasks, return_exceptions=True)
    finally:
        executor.shutdown(wait=True)

    reports: List[ClaimReport] = []
    verdicts: List[Verdict] = []
    errors: Dict[str, str] = {}
    status = 0
    for i, result in enumerate(results):
        mapping = task_mapping[i]
        if isinstance(result, Exception):
            key = f"lambda={mapping['lambda']} beta={mapping['beta']}"
            logger.error(f"Sweep instance {key} failed: {result}")
            errors[key] = getattr(result, "detail", repr(result))
            status = max(status, getattr(result, "exit_status", KLRLabError.exit_status))
            continue
        reports.extend(ClaimReport.model_validate(r) for r in result["reports"])
        verdicts.extend(Verdict.model_validate(v) for v in result["verdicts"])

    report = RunReport(
        summary=summarize("sweep", len(instances), reports, errors),
        reports=reports,
        verdicts=verdicts,
        data={"instances": task_mapping},
    )
    counterexamples = [v for v in verdicts if v.verdict != "surjective"]
    logger.info(
        f"Sweep completed: {len(instances)} instances, {report.summary.failed} failed claims, "
        f"{len(counterexamples)} non-surjective verdicts"
    )
    if status == 0 and not report.ok:
        status = 1
    return report, status
