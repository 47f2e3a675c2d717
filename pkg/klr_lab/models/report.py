from pydantic import BaseModel, Field
from typing import List, Optional, Dict, Any, Literal

ClaimStatus = Literal["pass", "fail", "info"]


class ClaimReport(BaseModel):
    """One checked statement about one instance"""
    instance: str = Field(..., description="Human-readable instance label, e.g. 'A2 L=(1,0) b=a1+a2'")
    claim: str = Field(..., description="Descriptive tag of the statement being checked")
    status: ClaimStatus = Field(..., description="pass, fail, or info for recorded observations")
    witness: Optional[Dict[str, Any]] = Field(None, description="Data supporting the status (dimensions, residuals, counterexamples)")
    statement: Optional[str] = Field(None, description="The mathematical statement the claim instantiates")

    @property
    def failed(self) -> bool:
        return self.status == "fail"


class Verdict(BaseModel):
    """Center-surjectivity verdict for one multiplicity-free instance"""
    cartan: str = Field(..., description="Cartan datum name")
    lambda_: Dict[str, int] = Field(..., alias="lambda", description="Dominant weight coordinates")
    beta: Dict[str, int] = Field(..., description="Root multiplicities")
    gamma: List[str] = Field(..., description="Initial weight defining the order on sequences")
    dim_center: int = Field(..., description="Dimension of the center of the cyclotomic quotient")
    dim_sym_image: int = Field(..., description="Dimension of the image of symmetric elements")
    dim_cocenter: int = Field(..., description="Dimension of A/[A,A] by linear algebra")
    t_gamma_size: int = Field(..., description="Size of the monomial cocenter basis")
    iota_injective: bool = Field(..., description="Whether the level-raising exponent shift is injective into the next basis")
    verdict: Literal["surjective", "not-surjective"] = Field(..., description="Outcome of the center comparison")

    class Config:
        populate_by_name = True


class RunSummary(BaseModel):
    """Summary section of a report"""
    task: str = Field(..., description="Task that produced the report")
    instances: int = Field(0, description="Number of instances run")
    total_claims: int = Field(..., description="Claims checked")
    passed: int = Field(..., description="Claims that held")
    failed: int = Field(..., description="Claims that failed")
    errors: Dict[str, str] = Field(default_factory=dict, description="Instances that raised, with the error detail")


class RunReport(BaseModel):
    """Complete report written by the CLI"""
    summary: RunSummary = Field(..., description="Counts and status")
    reports: List[ClaimReport] = Field(default_factory=list, description="Every checked claim, in run order")
    verdicts: List[Verdict] = Field(default_factory=list, description="Center verdicts, one per instance")
    data: Dict[str, Any] = Field(default_factory=dict, description="Task output (bases, dimensions, elements)")

    @property
    def ok(self) -> bool:
        return self.summary.failed == 0 and not self.summary.errors

    class Config:
        json_schema_extra = {
            "example": {
                "summary": {
                    "task": "center-check",
                    "instances": 1,
                    "total_claims": 3,
                    "passed": 3,
                    "failed": 0,
                    "errors": {}
                },
                "reports": [
                    {
                        "instance": "A2 L=(1,1) b=a1+a2",
                        "claim": "center-equals-symmetric-image",
                        "status": "pass",
                        "witness": {"dim_center": 3, "dim_sym_image": 3},
                        "statement": "Z(R^Lambda_beta) is the image of the symmetric elements"
                    }
                ],
                "verdicts": [],
                "data": {}
            }
        }


# Statement behind each claim tag, written into every report entry
STATEMENTS: Dict[str, str] = {
    # R_beta
    "idempotent-orthogonality": "e(nu) e(mu) = delta_{nu,mu} e(nu)",
    "dots-commute-with-idempotents": "x_k e(nu) = e(nu) x_k",
    "dots-commute": "x_k x_l = x_l x_k",
    "crossing-idempotent": "tau_k e(nu) = e(s_k nu) tau_k",
    "crossing-dot": "tau_k x_l e(nu) - x_{s_k(l)} tau_k e(nu) = (delta_{l,k+1} - delta_{l,k}) e(nu) when nu_k = nu_{k+1}, and 0 otherwise",
    "crossing-square": "tau_k^2 e(nu) = Q_{nu_k,nu_{k+1}}(x_k, x_{k+1}) e(nu)",
    "distant-crossings-commute": "tau_k tau_l = tau_l tau_k for |k - l| > 1",
    "braid": "(tau_{k+1} tau_k tau_{k+1} - tau_k tau_{k+1} tau_k) e(nu) is a divided difference of Q when nu_k = nu_{k+2} != nu_{k+1}, and 0 otherwise",
    "commutation-display": "the three-term commutation display for f tau_k e(nu) agrees with the two-term rule",
    "two-sided-demazure": "tau_k f - s_k(f) tau_k = demazure_k(f) on equal labels",
    "reduced-word-independence": "every reduced word of w evaluates to tau_w plus shorter terms",
    "crossing-product-equals-q": "tau_{u^-1} tau_u e(nu) = Q_{u,nu} e(nu) when u crosses no equal labels",
    "crossing-product-equal-labels": "tau_{u^-1} tau_u e(nu) against Q_{u,nu} e(nu) when u crosses equal labels",
    "associativity": "(ab)c = a(bc) in R_beta",
    "degree-additivity": "deg(ab) = deg a + deg b for nonzero products",
    "polynomial-representation": "the polynomial representation is multiplicative",
    # R^Lambda_beta
    "generator-monic": "g_{nu,k} lies in k[x_1..x_k] and is monic in x_k",
    "cap-formula": "the x_k-degree of g_{nu,k} matches the closed-form cap",
    "biweight-dimension": "the monomial basis of e(target) R^Lambda_beta e(nu) has the graded dimension of an independent spanning-set computation",
    "ideal-basis": "the listed ideal elements reduce to zero and are independent",
    "nilhecke-dimension": "dim R^{l Lambda_i}_{n alpha_i} = n! l! / (l - n)!",
    "quotient-associative": "the structure constants are associative",
    "quotient-unital": "the structure constants have a unit",
    "quotient-graded": "the structure constants respect the grading",
    "z-central": "z(i, beta) is central in R^Lambda_beta",
    "symmetric-image-central": "symmetric elements are central in R^Lambda_beta",
    "center-equals-symmetric-image": "Z(R^Lambda_beta) is the image of the symmetric elements",
    "symmetrizing-form": "R^Lambda_beta has a nondegenerate trace of degree -d_{Lambda,beta}",
    "top-degree": "the top degree of R^Lambda_beta is d_{Lambda,beta}",
    "annihilator-equals-kernel": "Ann z(i, beta) in R^{Lambda+Lambda_i}_beta is the kernel of the projection onto R^Lambda_beta",
    "trace-identity": "t_{Lambda+Lambda_i}(a z(i, beta)) = c t_Lambda(p(a)) for every a, with one scalar c",
    "zero-quotient": "R^Lambda_beta = 0",
    # cocenter
    "cocenter-basis-size": "|T_gamma| = dim R^Lambda_beta / [R^Lambda_beta, R^Lambda_beta]",
    "cocenter-basis-independent": "T_gamma is independent modulo commutators",
    "cocenter-reduce-consistent": "the cocenter reducer agrees with linear algebra modulo commutators",
    "commutator-generators-vanish": "indecomposable commutator generators vanish in the cocenter",
    "decomposition-identity": "commutator generators are sums of indecomposable ones",
    "leading-term-partition": "every x^c e(nu) is exactly one of: in T_gamma, the leading term of an ideal element, the leading term of a commutator generator",
    "center-cocenter-duality": "dim Z(R^Lambda_beta) = dim of the cocenter",
    "iota-injective": "the exponent shift maps T_gamma at Lambda injectively into T_gamma at Lambda + Lambda_i",
    "iota-criterion-agrees": "the center is the symmetric image exactly when every level-raising map is injective",
}


def claim(instance: str, tag: str, ok: bool, **witness) -> ClaimReport:
    return ClaimReport(
        instance=instance, claim=tag, status="pass" if ok else "fail",
        witness=witness or None, statement=STATEMENTS.get(tag),
    )


def observation(instance: str, tag: str, **witness) -> ClaimReport:
    return ClaimReport(instance=instance, claim=tag, status="info", witness=witness or None, statement=STATEMENTS.get(tag))
