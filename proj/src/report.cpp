#include "specvec/report.hpp"

#include <cmath>

namespace specvec {

Json number_json(double x) {
  if (!std::isfinite(x)) return Json(nullptr);
  return Json(x);
}

Json tool_json() { return Json{{"name", kToolName}, {"version", kToolVersion}}; }

Json tolerances_json(const IdentityOptions& opts) {
  return Json{{"off_diag_stop", opts.spectral.off_diag_stop},
              {"max_sweeps", opts.spectral.max_sweeps},
              {"distinct_threshold", opts.distinct_threshold},
              {"clamp_bound", opts.clamp_bound}};
}

Json gap_json(const GapReport<double>& g) {
  return Json{{"min_abs_gap", number_json(g.min_abs_gap)},
              {"min_rel_gap", number_json(g.min_rel_gap)},
              {"distinct", g.distinct}};
}

Json signed_log_json(const SignedLogValue<double>& v) {
  return Json{{"sign", v.sign()}, {"log_magnitude", number_json(v.log_magnitude())}, {"value", number_json(v.to_real())}};
}

namespace {

Json grid(const MagnitudeMatrix<double>& m, auto&& field) {
  Json rows = Json::array();
  for (Index i = 0; i < m.dim; ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.dim; ++j) row.push_back(field(m.cell(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Json error_report_json(const ErrorReport<double>& e) {
  Json j{{"max_abs_err", number_json(e.max_abs_err)},
         {"mean_abs_err", number_json(e.mean_abs_err)},
         {"worst_cell", Json::array({e.worst_cell.first + 1, e.worst_cell.second + 1})},
         {"compared_cells", e.compared_cells},
         {"excluded_cells", e.excluded_cells}};
  if (e.compared_cells == 0) j["worst_cell"] = nullptr;
  return j;
}

Json magnitude_json(const Recovery<double>& rec, const std::optional<ErrorReport<double>>& oracle) {
  const auto& m = rec.magnitudes;
  Json spectrum = Json::array();
  for (Index k = 0; k < rec.spectrum.size(); ++k) spectrum.push_back(number_json(rec.spectrum(k)));

  Json indeterminate = Json::array();
  for (Index i = 0; i < m.dim; ++i)
    for (Index j = 0; j < m.dim; ++j) {
      const auto& c = m.cell(i, j);
      if (c.determinate()) continue;
      indeterminate.push_back(Json{{"i", i + 1},
                                   {"j", j + 1},
                                   {"lhs_coefficient", signed_log_json(c.sides.lhs_coefficient)},
                                   {"rhs", signed_log_json(c.sides.rhs)}});
    }

  Json j{{"side", to_string(m.side)},
         {"dim", m.dim},
         {"spectrum", std::move(spectrum)},
         {"gap", gap_json(rec.gaps)},
         {"clamp_bound", m.clamp_bound},
         {"values", grid(m, [](const CellEstimate<double>& c) {
            return c.determinate() ? number_json(c.value) : Json(nullptr);
          })},
         {"raw", grid(m, [](const CellEstimate<double>& c) { return number_json(c.raw); })},
         {"status", grid(m, [](const CellEstimate<double>& c) { return Json(to_string(c.status)); })},
         {"cond_score", grid(m, [](const CellEstimate<double>& c) { return number_json(c.cond_score); })},
         {"indeterminate_count", m.indeterminate_count()},
         {"indeterminate_cells", std::move(indeterminate)}};
  if (oracle) j["oracle"] = error_report_json(*oracle);
  return j;
}

Json interlacing_json(const InterlacingSummary<double>& s) {
  return Json{{"deletions_checked", s.deletions_checked},
              {"violations", s.violations},
              {"max_violation", number_json(s.max_violation)},
              {"slack", number_json(s.slack)},
              {"passed", s.ok()}};
}

Json stability_json(const StabilityReport<double>& r) {
  auto quant = [](const Quantiles<double>& q) {
    return Json{{"min", number_json(q.min)},
                {"q25", number_json(q.q25)},
                {"median", number_json(q.median)},
                {"q75", number_json(q.q75)},
                {"max", number_json(q.max)}};
  };
  Json trials = Json::array();
  for (const auto& t : r.records) {
    Json tj{{"trial", t.trial + 1}, {"skipped", t.skipped}};
    if (!t.skipped) {
      tj["max_drift"] = number_json(t.max_drift);
      tj["min_rel_gap"] = number_json(t.min_rel_gap);
      tj["compared_cells"] = t.compared_cells;
    }
    trials.push_back(std::move(tj));
  }
  return Json{{"epsilon", number_json(r.epsilon)},
              {"trials", r.trials},
              {"seed", r.seed},
              {"skipped", r.skipped},
              {"base_min_rel_gap", number_json(r.base_min_rel_gap)},
              {"drift", quant(r.drift_summary)},
              {"min_rel_gap", quant(r.gap_summary)},
              {"per_trial", std::move(trials)}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace specvec
