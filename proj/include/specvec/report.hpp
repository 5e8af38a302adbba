#pragma once

// JSON serialization of recovery, verification and perturbation results.
// Object keys keep insertion order; non-finite numbers become null.

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "specvec/identity.hpp"
#include "specvec/verify.hpp"

namespace specvec {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "specvec";
inline constexpr const char* kToolVersion = "0.1.0";

Json number_json(double x);
Json tool_json();
Json tolerances_json(const IdentityOptions& opts);
Json gap_json(const GapReport<double>& g);
Json signed_log_json(const SignedLogValue<double>& v);

/// Grids, flags, gap report and the product sides of every indeterminate
/// cell. Cell indices in the output are 1-based.
Json magnitude_json(const Recovery<double>& rec, const std::optional<ErrorReport<double>>& oracle);

Json error_report_json(const ErrorReport<double>& e);
Json interlacing_json(const InterlacingSummary<double>& s);
Json stability_json(const StabilityReport<double>& r);

/// Pretty-printed with two-space indent and a trailing newline.
std::string dump(const Json& j);

}  // namespace specvec
