#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "bb84aes/error.hpp"
#include "bb84aes/harness.hpp"

namespace bb84aes {

using ordered_json = nlohmann::ordered_json;

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

void MetricsReport::add(std::string name, MetricValue value, std::string unit) {
  metrics.push_back({std::move(name), std::move(value), std::move(unit)});
}

const Metric* MetricsReport::find(std::string_view name) const {
  for (const Metric& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

double MetricsReport::number(std::string_view name) const {
  const Metric* m = find(name);
  if (m == nullptr) throw Error(ErrorCode::InvalidArgument, "no metric " + std::string(name));
  if (const auto* i = std::get_if<std::int64_t>(&m->value)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&m->value)) return *d;
  throw Error(ErrorCode::InvalidArgument, "metric " + std::string(name) + " is not numeric");
}

std::string MetricsReport::text(std::string_view name) const {
  const Metric* m = find(name);
  if (m == nullptr) throw Error(ErrorCode::InvalidArgument, "no metric " + std::string(name));
  if (const auto* s = std::get_if<std::string>(&m->value)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&m->value)) return std::to_string(*i);
  return format_number(std::get<double>(m->value));
}

ReportFormat report_format_from_string(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  throw Error(ErrorCode::RangeError, "unknown format '" + name + "'");
}

namespace {

std::string csv_cell(const MetricValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  const std::string& s = std::get<std::string>(v);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

ordered_json json_value(const MetricValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) return std::strtod(format_number(*d).c_str(), nullptr);
  return std::get<std::string>(v);
}

}  // namespace

std::string emit_report(const MetricsReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    ordered_json root;
    root["metrics"] = ordered_json::array();
    for (const Metric& m : report.metrics) {
      root["metrics"].push_back({{"name", m.name}, {"value", json_value(m.value)}, {"unit", m.unit}});
    }
    root["events"] = ordered_json::array();
    for (const ReportEvent& e : report.events) {
      root["events"].push_back({{"tick", e.tick}, {"kind", e.kind}, {"group", e.group}, {"pulse_index", e.pulse_index}});
    }
    return root.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "metric,value,unit\n";
  for (const Metric& m : report.metrics) out << m.name << ',' << csv_cell(m.value) << ',' << m.unit << '\n';
  if (!report.events.empty()) {
    out << "\n# events\ntick,kind,group,pulse_index\n";
    for (const ReportEvent& e : report.events) {
      out << e.tick << ',' << e.kind << ',' << e.group << ',' << e.pulse_index << '\n';
    }
  }
  return out.str();
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!std::cout) throw Error(ErrorCode::IOError, "write to stdout failed");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, "cannot open " + path);
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::IOError, "write to " + path + " failed");
}

// --- Sweep --------------------------------------------------------------------

std::vector<SweepRow> sweep_xi(int xi_min, int xi_max, std::span<const int> tag_bits, double clock_hz,
                               std::uint64_t seed) {
  if (xi_min < kMinBasesPerTag || xi_max > kMaxBasesPerTag || xi_min > xi_max) {
    throw Error(ErrorCode::RangeError, "xi range must lie within [2, 20]");
  }
  std::vector<SweepRow> rows;
  for (const int bits : tag_bits) {
    const TagWidth width = tag_width_from_bits(bits);
    Rng keys = derive_stream(seed, "sweep/" + std::to_string(bits));
    for (int xi = xi_min; xi <= xi_max; ++xi) {
      SweepRow row;
      row.xi = xi;
      row.tag_bits = bits;
      row.bits_per_qubit = static_cast<double>(bits) / xi;
      row.table_bytes = (std::size_t{1} << xi) * static_cast<std::size_t>(bits) / 8;
      row.max_comparisons = xi + 1;
      row.classical_rate_bps = clock_hz * row.bits_per_qubit;

      const SessionPair s = make_sessions(ProtocolVariant::dense(xi, width), keys);
      const LookupTable& table = *s.bob.lookup_table();
      row.measured_table_bytes = table.footprint_bytes();
      // Every hit, plus a miss between each neighbouring pair and at both ends.
      int worst = 0;
      const auto entries = table.entries();
      for (std::size_t i = 0; i < entries.size(); ++i) {
        worst = std::max(worst, binary_search(entries, entries[i].digest).comparisons);
        if (entries[i].digest > 0) worst = std::max(worst, binary_search(entries, entries[i].digest - 1).comparisons);
      }
      worst = std::max(worst, binary_search(entries, entries.back().digest + 1).comparisons);
      row.measured_max_comparisons = worst;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string emit_sweep(std::span<const SweepRow> rows, ReportFormat format) {
  if (format == ReportFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const SweepRow& r : rows) {
      arr.push_back({{"xi", r.xi},
                     {"tag_bits", r.tag_bits},
                     {"classical_bits_per_qubit", json_value(r.bits_per_qubit)},
                     {"table_bytes", r.table_bytes},
                     {"max_comparisons", r.max_comparisons},
                     {"classical_rate_bps", json_value(r.classical_rate_bps)},
                     {"measured_table_bytes", r.measured_table_bytes},
                     {"measured_max_comparisons", r.measured_max_comparisons}});
    }
    return arr.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "xi,tag_bits,classical_bits_per_qubit,table_bytes,max_comparisons,classical_rate_bps,"
         "measured_table_bytes,measured_max_comparisons\n";
  for (const SweepRow& r : rows) {
    out << r.xi << ',' << r.tag_bits << ',' << format_number(r.bits_per_qubit) << ',' << r.table_bytes << ','
        << r.max_comparisons << ',' << format_number(r.classical_rate_bps) << ',' << r.measured_table_bytes << ','
        << r.measured_max_comparisons << '\n';
  }
  return out.str();
}

}  // namespace bb84aes

namespace bb84aes {

std::string emit_table1(std::span<const Table1Row> rows, ReportFormat format) {
  const auto b = [](Basis x) { return std::string(1, to_char(x)); };
  if (format == ReportFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const Table1Row& r : rows) {
      arr.push_back({{"alice_basis", b(r.alice)},
                     {"eve_basis", b(r.eve)},
                     {"tag", r.flip ? "replaced" : "forwarded"},
                     {"bob_basis", b(r.expected_bob)},
                     {"expected_error", json_value(r.expected_error)},
                     {"measured_error", json_value(r.measured_error)},
                     {"bob_in_expected_basis", json_value(r.bob_in_expected_basis)},
                     {"clicks", r.clicks}});
    }
    return arr.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "alice_basis,eve_basis,tag,bob_basis,expected_error,measured_error,bob_in_expected_basis,clicks\n";
  for (const Table1Row& r : rows) {
    out << b(r.alice) << ',' << b(r.eve) << ',' << (r.flip ? "replaced" : "forwarded") << ',' << b(r.expected_bob) << ','
        << format_number(r.expected_error) << ',' << format_number(r.measured_error) << ','
        << format_number(r.bob_in_expected_basis) << ',' << r.clicks << '\n';
  }
  return out.str();
}

std::string emit_attacks(std::span<const AttackRow> rows, ReportFormat format) {
  if (format == ReportFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const AttackRow& r : rows) {
      arr.push_back({{"attack", r.attack}, {"defender", r.defender}, {"metric", r.metric},
                     {"value", json_value(r.value)}, {"unit", r.unit}});
    }
    return arr.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "attack,defender,metric,value,unit\n";
  for (const AttackRow& r : rows) {
    out << r.attack << ',' << r.defender << ',' << r.metric << ',' << csv_cell(r.value) << ',' << r.unit << '\n';
  }
  return out.str();
}

}  // namespace bb84aes
