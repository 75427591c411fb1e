#pragma once

// Scenario configuration, execution, reporting and the batch runs behind the
// command-line tool.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bb84aes/adversary.hpp"
#include "bb84aes/channel.hpp"
#include "bb84aes/protocol.hpp"

namespace bb84aes {

struct ScenarioConfig {
  // [scenario]
  std::string variant = "basic";  // basic, reduced_processing, reduced_bandwidth, dense, plain, biased
  int xi = 8;
  std::optional<int> tag_bits;  // default: 64 for dense / reduced_bandwidth, else 128
  bool reduced_processing = false;
  std::size_t pulses = 100000;
  std::uint64_t seed = 1;
  bool abort_on_detect = false;
  std::size_t raw_bit_threshold = 100000;
  double bias = 0.9;
  Basis key_basis = Basis::Z;
  // [channel]
  ChannelConfig channel;
  // [eve]
  EveStrategy eve;
  // [crypto]
  CryptoParams crypto;
  // [post]
  double sample_fraction = 0.1;
  double ec_inefficiency = 1.2;
  unsigned epsilon_exponent = 40;

  [[nodiscard]] ProtocolVariant protocol() const;
  void validate() const;
};

/// key = value lines under [section] headers; '#' and ';' start comments.
/// `overrides` are "section.key=value" and win over the text.
ScenarioConfig parse_config(std::string_view text, std::span<const std::string> overrides = {});
ScenarioConfig load_config(const std::string& path, std::span<const std::string> overrides = {});

using MetricValue = std::variant<std::int64_t, double, std::string>;

struct Metric {
  std::string name;
  MetricValue value;
  std::string unit;
};

struct ReportEvent {
  std::uint64_t tick;
  std::string kind;
  std::size_t group;
  std::size_t pulse_index;
};

struct MetricsReport {
  std::vector<Metric> metrics;
  std::vector<ReportEvent> events;

  void add(std::string name, MetricValue value, std::string unit);
  [[nodiscard]] const Metric* find(std::string_view name) const;
  /// Numeric value of a metric; throws InvalidArgument if missing or textual.
  [[nodiscard]] double number(std::string_view name) const;
  [[nodiscard]] std::string text(std::string_view name) const;
};

MetricsReport run_scenario(const ScenarioConfig& config);

enum class ReportFormat : std::uint8_t { Csv, Json };
ReportFormat report_format_from_string(const std::string& name);

std::string emit_report(const MetricsReport& report, ReportFormat format);
/// Write to `path`, or stdout when path is empty or "-". Throws IOError.
void write_output(const std::string& text, const std::string& path);

/// Six significant digits, the precision used for every float in reports.
std::string format_number(double value);

// ---------------------------------------------------------------------------
// Resource sweep

struct SweepRow {
  int xi = 0;
  int tag_bits = 0;
  double bits_per_qubit = 0.0;
  std::size_t table_bytes = 0;
  int max_comparisons = 0;
  double classical_rate_bps = 0.0;
  std::size_t measured_table_bytes = 0;
  int measured_max_comparisons = 0;
};

/// Closed forms next to values measured on real tables.
std::vector<SweepRow> sweep_xi(int xi_min, int xi_max, std::span<const int> tag_bits, double clock_hz,
                               std::uint64_t seed = 1);
std::string emit_sweep(std::span<const SweepRow> rows, ReportFormat format);

// ---------------------------------------------------------------------------
// Batches

struct Table1Row {
  Basis alice;
  Basis eve;
  bool flip;
  Basis expected_bob;
  double expected_error;
  double measured_error;
  double bob_in_expected_basis;  // fraction of clicks measured in expected_bob
  std::size_t clicks;
};

/// All eight (Alice basis, Eve basis, tag forwarding) cells against a
/// reduced-processing Bob on a noiseless, lossless link.
std::vector<Table1Row> table1(std::uint64_t seed, std::size_t pulses = 100000);
std::string emit_table1(std::span<const Table1Row> rows, ReportFormat format);

struct AttackRow {
  std::string attack;
  std::string defender;
  std::string metric;
  MetricValue value;
  std::string unit;
};

std::vector<AttackRow> attacks(std::uint64_t seed, std::size_t pulses = 300000);
std::string emit_attacks(std::span<const AttackRow> rows, ReportFormat format);

}  // namespace bb84aes
