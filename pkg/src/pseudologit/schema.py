"""JSON Schemas for the machine-readable reports written by the CLI."""

SCHEMA_VERSION = "1.0"

_NUM = {"type": "number"}
_NUM_OR_NULL = {"type": ["number", "null"]}

_INTERVAL = {
    "type": "object",
    "required": ["lower", "upper", "level", "method"],
    "properties": {
        "lower": _NUM,
        "upper": _NUM,
        "level": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "method": {"enum": ["wald", "bootstrap-percentile"]},
    },
}

_FIT = {
    "type": "object",
    "required": [
        "model", "method", "converged", "iterations", "grad_norm", "parameter_names",
        "estimates", "model_params", "std_errors", "std_error_method", "intervals",
        "loglik", "minus2loglik", "k", "n", "aic", "bic",
    ],
    "properties": {
        "model": {"type": "string"},
        "method": {"enum": ["MoM-paper", "MoM-corrected", "MLE-quasi-newton", "MLE-paper-hybrid"]},
        "converged": {"type": "boolean"},
        "iterations": {"type": "integer", "minimum": 0},
        "grad_norm": _NUM,
        "parameter_names": {"type": "array", "items": {"type": "string"}},
        "estimates": {"type": "object", "additionalProperties": _NUM},
        "model_params": {
            "type": "object",
            "required": ["mu", "sigma0", "alpha", "beta", "sigma1"],
            "additionalProperties": _NUM,
        },
        "std_errors": {"type": ["object", "null"], "additionalProperties": _NUM},
        "std_error_method": {"enum": ["observed-information", "bootstrap", None]},
        "intervals": {"type": "object", "additionalProperties": _INTERVAL},
        "bootstrap_intervals": {"type": "object", "additionalProperties": _INTERVAL},
        "bootstrap_failed": {"type": "integer", "minimum": 0},
        "loglik": _NUM,
        "minus2loglik": _NUM,
        "k": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "aic": _NUM,
        "bic": _NUM,
        "note": {"type": "string"},
    },
}

_COMMAND = {
    "type": "object",
    "required": ["name", "options"],
    "properties": {"name": {"type": "string"}, "options": {"type": "object"}},
}

_INPUT = {
    "type": "object",
    "required": ["path", "sha256", "n"],
    "properties": {
        "path": {"type": "string"},
        "sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "n": {"type": "integer", "minimum": 1},
    },
}

FIT_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "pseudologit fit report",
    "type": "object",
    "required": ["schema_version", "command", "input", "fit", "pearson_correlation", "warnings"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": _COMMAND,
        "input": _INPUT,
        "fit": _FIT,
        "pearson_correlation": _NUM_OR_NULL,
        "warnings": {"type": "array", "items": {"type": "string"}},
    },
}

TEST_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "pseudologit likelihood-ratio test report",
    "type": "object",
    "required": ["schema_version", "command", "input", "full", "restricted", "test",
                 "pearson_correlation", "warnings"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": _COMMAND,
        "input": _INPUT,
        "full": _FIT,
        "restricted": _FIT,
        "test": {
            "type": "object",
            "required": ["submodel", "statistic_T", "log_T", "minus2logT", "df", "p_value", "converged"],
            "properties": {
                "submodel": {"enum": ["equal-scales", "sigma0-one", "sigma1-one"]},
                "statistic_T": {"type": "number", "minimum": 0},
                "log_T": _NUM,
                "minus2logT": {"type": "number", "minimum": 0},
                "df": {"type": "integer", "minimum": 1},
                "p_value": {"type": "number", "minimum": 0, "maximum": 1},
                "converged": {"type": "boolean"},
            },
        },
        "pearson_correlation": _NUM_OR_NULL,
        "warnings": {"type": "array", "items": {"type": "string"}},
    },
}

_SUMMARY = {
    "type": ["object", "null"],
    "required": ["mean", "se", "bias", "ci_lower", "ci_upper", "n_used"],
    "properties": {
        "mean": _NUM, "se": {"type": "number", "minimum": 0}, "bias": _NUM,
        "ci_lower": _NUM, "ci_upper": _NUM, "n_used": {"type": "integer", "minimum": 1},
    },
}

STUDY_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "pseudologit simulation study report",
    "type": "object",
    "required": ["schema_version", "command", "config", "blocks"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": _COMMAND,
        "config": {"type": "object"},
        "blocks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["n", "replicates", "n_failed", "failure_rate", "pc_mean",
                             "minus2loglik_mean", "rows"],
                "properties": {
                    "n": {"type": "integer", "minimum": 6},
                    "replicates": {"type": "integer", "minimum": 1},
                    "n_failed": {"type": "integer", "minimum": 0},
                    "failure_rate": {"type": "number", "minimum": 0, "maximum": 1},
                    "pc_mean": _NUM_OR_NULL,
                    "minus2loglik_mean": _NUM,
                    "restricted_minus2loglik_mean": _NUM_OR_NULL,
                    "rows": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["model", "parameter", "true_value", "mle",
                                         "mom_paper", "mom_corrected", "boot_se_mle"],
                            "properties": {
                                "model": {"type": "string"},
                                "parameter": {"type": "string"},
                                "true_value": _NUM,
                                "mle": _SUMMARY,
                                "mom_paper": _SUMMARY,
                                "mom_corrected": _SUMMARY,
                                "boot_se_mle": _NUM_OR_NULL,
                            },
                        },
                    },
                },
            },
        },
    },
}

SCHEMAS = {"fit": FIT_REPORT_SCHEMA, "test": TEST_REPORT_SCHEMA, "simulate": STUDY_REPORT_SCHEMA}

#: Fixed column order of the CSV outputs.
FIT_CSV_COLUMNS = (
    "model", "parameter", "estimate", "std_error", "ci_lower", "ci_upper",
    "minus2loglik", "k", "aic", "bic", "pearson_correlation", "minus2logT", "p_value",
)
STUDY_CSV_COLUMNS = (
    "model", "n", "parameter", "true_value",
    "mle_mean", "se_mle", "bias_mle", "ci_mle_lower", "ci_mle_upper",
    "mom_variant", "mom_mean", "se_mom", "bias_mom", "ci_mom_lower", "ci_mom_upper",
    "boot_se_mle", "pc_mean", "minus2loglik_mean", "n_used", "failure_rate",
)
SAMPLE_CSV_COLUMNS = ("x", "y")
GRID_CSV_COLUMNS = ("x", "y", "density")
