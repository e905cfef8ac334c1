"""Edge-level distributions and structural-variability measures for graphs.

Graph structures (undirected graphs and DAGs) are modelled through the
multivariate distribution they induce on the set of vertex pairs: each
pair carries a Bernoulli edge state or a Trinomial arc state. The package
estimates those distributions from graph collections, enumerates or
samples the uniform reference case, analyses the covariance eigenvalue
geometry, and reduces everything to normalised variability statistics.
"""

__version__ = "0.1.0"

from .census import CensusAccumulator, census_dags, census_ugs, enumerate_dags, enumerate_dags_naive
from .edgedist import (
    BernoulliSummary,
    TrinomialSummary,
    abs_transform,
    bernoulli_from_states,
    fit_bernoulli,
    fit_trinomial,
    trinomial_from_states,
    variance_decomposition,
)
from .errors import FormatError, GraphvarError, InfeasibleError
from .graphs import (
    ArcState,
    EdgeIndexMap,
    Graph,
    arc_state_vector,
    directed_graph,
    graph_from_state_vector,
    is_acyclic,
    read_jsonl,
    reverse_all,
    skeleton,
    undirected_graph,
    write_jsonl,
)
from .learning import (
    BootstrapRun,
    Dataset,
    LearnerSpec,
    bic_score,
    bootstrap,
    hc_bic,
    mi_skeleton,
    mutual_information,
    select_algorithm,
    select_tuning,
)
from .measures import (
    BuntineAnalytics,
    FmgBound,
    MaxEntReference,
    VariabilityReport,
    buntine_prior_analytics,
    conjecture_evidence,
    fmg_covariance_bound,
    fmg_limit_bounds,
    frobenius_variability,
    generalised_variance,
    maxent_reference,
    total_variance,
    variability_report,
)
from .sampling import (
    McmcConfig,
    mcmc_step,
    sample_buntine_states,
    sample_dag_states,
    sample_ug_states,
    sample_uniform_dags,
    sample_uniform_ugs,
)
from .spectral import (
    FAMILY_BERNOULLI,
    FAMILY_TRINOMIAL,
    SimplexPosition,
    SpectralSummary,
    eigenvalues_symmetric,
    jacobi_eigenvalues,
    simplex_position,
)
