#pragma once

// Report rows, status aggregation and deterministic text output. Every
// floating value is printed with 17 significant digits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hardbody {

enum class Status { Info, Pass, Warn, Fail };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::Info: return "INFO";
    case Status::Pass: return "PASS";
    case Status::Warn: return "WARN";
    case Status::Fail: return "FAIL";
  }
  return "?";
}

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ReportRow {
  std::string quantity;
  double value = kNaN;
  double std_error = kNaN;
  std::int64_t n_samples = 0;
  double paper_bound = kNaN;
  double margin = kNaN;
  Status status = Status::Info;
};

struct Report {
  std::string command;
  nlohmann::json details = nlohmann::json::object();
  std::vector<ReportRow> rows;

  ReportRow& add(ReportRow r) { return rows.emplace_back(std::move(r)); }

  /// value <= bound. hard: Fail on violation, else Warn.
  ReportRow& upper(std::string q, double value, double bound, bool hard, double se = kNaN, std::int64_t ns = 0) {
    const double margin = bound - value;
    return add({std::move(q), value, se, ns, bound, margin, margin >= 0.0 ? Status::Pass : (hard ? Status::Fail : Status::Warn)});
  }
  ReportRow& lower(std::string q, double value, double bound, bool hard, double se = kNaN, std::int64_t ns = 0) {
    const double margin = value - bound;
    return add({std::move(q), value, se, ns, bound, margin, margin >= 0.0 ? Status::Pass : (hard ? Status::Fail : Status::Warn)});
  }
  ReportRow& flag(std::string q, bool ok, bool hard) {
    return add({std::move(q), ok ? 1.0 : 0.0, kNaN, 0, 1.0, ok ? 0.0 : -1.0, ok ? Status::Pass : (hard ? Status::Fail : Status::Warn)});
  }
  ReportRow& info(std::string q, double value, double se = kNaN, std::int64_t ns = 0) {
    return add({std::move(q), value, se, ns, kNaN, kNaN, Status::Info});
  }

  Status overall() const {
    Status s = Status::Pass;
    for (const auto& r : rows)
      if (r.status == Status::Fail || (r.status == Status::Warn && s != Status::Fail)) s = r.status;
    return s;
  }
};

/// 0 ok, 2 soft warnings only, 1 hard failure.
inline int exit_code(Status s) { return s == Status::Fail ? 1 : s == Status::Warn ? 2 : 0; }

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void dump_json(const nlohmann::json& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string pad_close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      // JSON has no inf/nan literals
      out += std::isfinite(v) ? format_number(v) : nlohmann::json(format_number(v)).dump();
      return;
    }
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + nlohmann::json(it.key()).dump() + ": ";
        dump_json(it.value(), indent, depth + 1, out);
      }
      out += "\n" + pad_close + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // numeric arrays stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const auto& e) { return e.is_primitive(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        dump_json(e, indent, depth + 1, out);
      }
      out += flat ? "]" : "\n" + pad_close + "]";
      return;
    }
    default:
      out += j.dump();
  }
}

inline std::string csv_field(double v) { return std::isnan(v) ? std::string() : format_number(v); }

}  // namespace detail

inline std::string dump_json(const nlohmann::json& j, int indent = 2) {
  std::string out;
  detail::dump_json(j, indent, 0, out);
  out += "\n";
  return out;
}

inline nlohmann::json to_json(const ReportRow& r) {
  return {{"quantity", r.quantity}, {"value", r.value},   {"stderr", r.std_error}, {"n_samples", r.n_samples},
          {"paper_bound", r.paper_bound}, {"margin", r.margin}, {"status", to_string(r.status)}};
}

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  return {{"command", r.command}, {"status", to_string(r.overall())}, {"rows", rows}, {"details", r.details}};
}

inline constexpr const char* kCsvHeader = "quantity,value,stderr,n_samples,paper_bound,margin,status";

inline std::string to_csv(const Report& r) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& row : r.rows) {
    out += row.quantity + "," + detail::csv_field(row.value) + "," + detail::csv_field(row.std_error) + "," +
           std::to_string(row.n_samples) + "," + detail::csv_field(row.paper_bound) + "," +
           detail::csv_field(row.margin) + "," + to_string(row.status) + "\n";
  }
  return out;
}

}  // namespace hardbody
