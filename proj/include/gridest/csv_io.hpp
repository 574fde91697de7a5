#pragma once

#include <string>
#include <vector>

#include "gridest/drem_estimator.hpp"
#include "gridest/model_core.hpp"
#include "gridest/truth_sim.hpp"

namespace gridest {

enum class FreqUnit { Auto, Pu, Hz };

/// Reads a measurement stream. The header must be exactly
/// `t,f_av,p_pfc_tot,p_e_pfc`; time must be strictly increasing and uniform
/// to 1e-9 s. Frequencies are accepted in pu or Hz and converted to pu;
/// FreqUnit::Auto detects the unit from the data and fails when ambiguous.
std::vector<Sample> ingest_csv(const std::string& path, const AggParams& params,
                               FreqUnit unit = FreqUnit::Auto);

/// Writes a measurement stream with full round-trip precision (frequency in pu).
void emit_csv(const std::vector<Sample>& stream, const std::string& path);

void emit_truth_csv(const std::vector<TruthPoint>& truth, const std::string& path);
std::vector<TruthPoint> ingest_truth_csv(const std::string& path);

void emit_estimates_csv(const std::vector<EstimateRecord>& trace, const std::string& path);
std::vector<EstimateRecord> ingest_estimates_csv(const std::string& path);

/// Two-column (t, value) helper for plot-data files.
void emit_columns_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns);

} // namespace gridest
