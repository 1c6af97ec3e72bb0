#pragma once

#include <string>
#include <utility>
#include <vector>

#include "core/bound.hpp"
#include "core/fitter.hpp"
#include "core/scaling.hpp"

namespace schedlaw {

// Shortest decimal that round-trips the double exactly.
std::string format_double(double v);

// Loss traces: header `step,loss` or `step,loss,lr`.
LossTrace trace_from_csv(const std::string& text);
std::string trace_to_csv(const LossTrace& trace);

// Bound traces: header `tau,bound`.
std::string bound_trace_to_csv(const BoundTrace& trace);

// Schedules as sequences: header `step,lr`.
std::string sequence_to_csv(const LearningRateSequence& lrs);

// Run records: header `eta_ref,T_or_tokens,unit,final_loss` with optional
// trailing `batch_size` and `model_size` columns.
std::vector<RunRecord> records_from_csv(const std::string& text);
std::string records_to_csv(const std::vector<RunRecord>& records);

// Prediction tables: header `T,predicted_loss`.
std::string prediction_table_to_csv(
    const std::vector<std::pair<double, double>>& rows);

}  // namespace schedlaw
