#include "core/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "core/errors.hpp"

namespace schedlaw {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      if (!current.empty() && current.back() == '\r') current.pop_back();
      lines.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty() && current.back() == '\r') current.pop_back();
  if (!current.empty()) lines.push_back(current);
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw validation_error("line " + std::to_string(line_no) + ": " + what);
}

double parse_double(const std::string& raw, std::size_t line_no,
                    const std::string& column) {
  const std::string s = trim(raw);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(line_no, "invalid number '" + raw + "' in column '" + column + "'");
  }
  if (!std::isfinite(value)) {
    fail(line_no, "non-finite value in column '" + column + "'");
  }
  return value;
}

std::int64_t parse_int(const std::string& raw, std::size_t line_no,
                       const std::string& column) {
  const std::string s = trim(raw);
  std::int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(line_no, "invalid integer '" + raw + "' in column '" + column + "'");
  }
  return value;
}

void expect_fields(const std::vector<std::string>& fields, std::size_t n,
                   std::size_t line_no) {
  if (fields.size() != n) {
    fail(line_no, "expected " + std::to_string(n) + " fields, got " +
                      std::to_string(fields.size()));
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

LossTrace trace_from_csv(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw validation_error("line 1: empty trace file");
  const std::string header = trim(lines[0]);
  bool has_lr = false;
  if (header == "step,loss,lr") {
    has_lr = true;
  } else if (header != "step,loss") {
    throw validation_error(
        "line 1: expected header 'step,loss' or 'step,loss,lr', got '" +
        header + "'");
  }
  LossTrace trace;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::vector<std::string> fields = split_fields(lines[i]);
    expect_fields(fields, has_lr ? 3 : 2, i + 1);
    trace.steps.push_back(parse_int(fields[0], i + 1, "step"));
    trace.losses.push_back(parse_double(fields[1], i + 1, "loss"));
    if (has_lr) trace.lrs.push_back(parse_double(fields[2], i + 1, "lr"));
  }
  validate(trace);
  return trace;
}

std::string trace_to_csv(const LossTrace& trace) {
  validate(trace);
  const bool has_lr = !trace.lrs.empty();
  std::string out = has_lr ? "step,loss,lr\n" : "step,loss\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    out += std::to_string(trace.steps[i]);
    out += ',';
    out += format_double(trace.losses[i]);
    if (has_lr) {
      out += ',';
      out += format_double(trace.lrs[i]);
    }
    out += '\n';
  }
  return out;
}

std::string bound_trace_to_csv(const BoundTrace& trace) {
  std::string out = "tau,bound\n";
  for (std::size_t i = 0; i < trace.tau_grid.size(); ++i) {
    out += std::to_string(trace.tau_grid[i]);
    out += ',';
    out += format_double(trace.values[i]);
    out += '\n';
  }
  return out;
}

std::string sequence_to_csv(const LearningRateSequence& lrs) {
  std::string out = "step,lr\n";
  for (std::size_t i = 0; i < lrs.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += format_double(lrs[i]);
    out += '\n';
  }
  return out;
}

std::vector<RunRecord> records_from_csv(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw validation_error("line 1: empty records file");
  const std::vector<std::string> header = split_fields(trim(lines[0]));
  const std::vector<std::string> required = {"eta_ref", "T_or_tokens", "unit",
                                             "final_loss"};
  if (header.size() < required.size()) {
    throw validation_error("line 1: records header is missing columns");
  }
  for (std::size_t i = 0; i < required.size(); ++i) {
    if (trim(header[i]) != required[i]) {
      throw validation_error("line 1: expected column '" + required[i] +
                             "', got '" + trim(header[i]) + "'");
    }
  }
  bool has_batch = false, has_model = false;
  for (std::size_t i = required.size(); i < header.size(); ++i) {
    const std::string name = trim(header[i]);
    if (name == "batch_size" && !has_batch && !has_model) {
      has_batch = true;
    } else if (name == "model_size" && !has_model) {
      has_model = true;
    } else {
      throw validation_error("line 1: unknown column '" + name + "'");
    }
  }
  const std::size_t width = header.size();
  std::vector<RunRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::vector<std::string> f = split_fields(lines[i]);
    expect_fields(f, width, i + 1);
    RunRecord r;
    r.eta_ref = parse_double(f[0], i + 1, "eta_ref");
    r.horizon = parse_double(f[1], i + 1, "T_or_tokens");
    try {
      r.unit = horizon_unit_from_string(trim(f[2]));
    } catch (const validation_error& e) {
      fail(i + 1, e.what());
    }
    r.final_loss = parse_double(f[3], i + 1, "final_loss");
    std::size_t col = 4;
    if (has_batch) {
      const std::string cell = trim(f[col]);
      if (!cell.empty()) r.batch_size = parse_double(cell, i + 1, "batch_size");
      ++col;
    }
    if (has_model) {
      const std::string cell = trim(f[col]);
      if (!cell.empty()) r.model_size = parse_double(cell, i + 1, "model_size");
    }
    try {
      validate(r);
    } catch (const validation_error& e) {
      fail(i + 1, e.what());
    }
    records.push_back(r);
  }
  if (records.empty()) throw validation_error("records file has no data rows");
  return records;
}

std::string records_to_csv(const std::vector<RunRecord>& records) {
  bool has_batch = false, has_model = false;
  for (const RunRecord& r : records) {
    has_batch = has_batch || r.batch_size != 0.0;
    has_model = has_model || r.model_size != 0.0;
  }
  std::string out = "eta_ref,T_or_tokens,unit,final_loss";
  if (has_batch) out += ",batch_size";
  if (has_model) out += ",model_size";
  out += '\n';
  for (const RunRecord& r : records) {
    out += format_double(r.eta_ref);
    out += ',';
    out += format_double(r.horizon);
    out += ',';
    out += to_string(r.unit);
    out += ',';
    out += format_double(r.final_loss);
    if (has_batch) {
      out += ',';
      if (r.batch_size != 0.0) out += format_double(r.batch_size);
    }
    if (has_model) {
      out += ',';
      if (r.model_size != 0.0) out += format_double(r.model_size);
    }
    out += '\n';
  }
  return out;
}

std::string prediction_table_to_csv(
    const std::vector<std::pair<double, double>>& rows) {
  std::string out = "T,predicted_loss\n";
  for (const auto& [T, loss] : rows) {
    out += format_double(T);
    out += ',';
    out += format_double(loss);
    out += '\n';
  }
  return out;
}

}  // namespace schedlaw
