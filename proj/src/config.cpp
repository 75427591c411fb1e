#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "bb84aes/error.hpp"
#include "bb84aes/harness.hpp"

namespace bb84aes {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Field {
  std::string key;   // section.key
  std::string value;
  std::string where;  // "line 3" or "--set"
};

[[noreturn]] void parse_fail(const Field& f, const std::string& why) {
  throw Error(ErrorCode::ParseError, f.where + ": " + f.key + ": " + why);
}

template <class T>
T parse_integer(const Field& f) {
  T out{};
  const std::string& v = f.value;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    // Accept 1e5-style integers when they are exact.
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || v.empty() || d < 0 || d != std::floor(d) || d > 1.8e19) {
      parse_fail(f, "expected an integer, got '" + v + "'");
    }
    return static_cast<T>(d);
  }
  return out;
}

double parse_double(const Field& f) {
  char* end = nullptr;
  const double d = std::strtod(f.value.c_str(), &end);
  if (f.value.empty() || end != f.value.c_str() + f.value.size() || !std::isfinite(d)) {
    parse_fail(f, "expected a number, got '" + f.value + "'");
  }
  return d;
}

bool parse_bool(const Field& f) {
  const std::string v = lower(f.value);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  parse_fail(f, "expected true/false, got '" + f.value + "'");
}

Basis parse_basis(const Field& f) {
  const std::string v = lower(f.value);
  if (v == "x") return Basis::X;
  if (v == "z") return Basis::Z;
  parse_fail(f, "expected X or Z, got '" + f.value + "'");
}

using Setter = std::function<void(ScenarioConfig&, const Field&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"scenario.variant", [](ScenarioConfig& c, const Field& f) { c.variant = lower(f.value); }},
      {"scenario.xi", [](ScenarioConfig& c, const Field& f) { c.xi = parse_integer<int>(f); }},
      {"scenario.tag_bits", [](ScenarioConfig& c, const Field& f) { c.tag_bits = parse_integer<int>(f); }},
      {"scenario.reduced_processing",
       [](ScenarioConfig& c, const Field& f) { c.reduced_processing = parse_bool(f); }},
      {"scenario.pulses", [](ScenarioConfig& c, const Field& f) { c.pulses = parse_integer<std::size_t>(f); }},
      {"scenario.seed", [](ScenarioConfig& c, const Field& f) { c.seed = parse_integer<std::uint64_t>(f); }},
      {"scenario.abort_on_detect", [](ScenarioConfig& c, const Field& f) { c.abort_on_detect = parse_bool(f); }},
      {"scenario.raw_bit_threshold",
       [](ScenarioConfig& c, const Field& f) { c.raw_bit_threshold = parse_integer<std::size_t>(f); }},
      {"scenario.clock_hz", [](ScenarioConfig& c, const Field& f) { c.channel.clock_hz = parse_double(f); }},
      {"scenario.bias", [](ScenarioConfig& c, const Field& f) { c.bias = parse_double(f); }},
      {"scenario.key_basis", [](ScenarioConfig& c, const Field& f) { c.key_basis = parse_basis(f); }},
      {"channel.mu", [](ScenarioConfig& c, const Field& f) { c.channel.mean_photon_number = parse_double(f); }},
      {"channel.attenuation_db", [](ScenarioConfig& c, const Field& f) { c.channel.attenuation_db = parse_double(f); }},
      {"channel.qber", [](ScenarioConfig& c, const Field& f) { c.channel.qber = parse_double(f); }},
      {"eve.strategy",
       [](ScenarioConfig& c, const Field& f) {
         try {
           c.eve.kind = eve_kind_from_string(lower(f.value));
         } catch (const Error&) {
           parse_fail(f, "unknown strategy '" + f.value + "'");
         }
       }},
      {"eve.attenuation_db", [](ScenarioConfig& c, const Field& f) { c.eve.attenuation_db = parse_double(f); }},
      {"eve.repeat", [](ScenarioConfig& c, const Field& f) { c.eve.repeat_count = parse_integer<std::uint64_t>(f); }},
      {"eve.p_usd", [](ScenarioConfig& c, const Field& f) { c.eve.p_usd = parse_double(f); }},
      {"eve.key_basis", [](ScenarioConfig& c, const Field& f) { c.eve.key_basis = parse_basis(f); }},
      {"eve.measure_basis", [](ScenarioConfig& c, const Field& f) { c.eve.measure_basis = parse_basis(f); }},
      {"eve.flip", [](ScenarioConfig& c, const Field& f) { c.eve.flip = parse_bool(f); }},
      {"crypto.iv_bits", [](ScenarioConfig& c, const Field& f) { c.crypto.iv_bits = parse_integer<int>(f); }},
      {"crypto.counter_width",
       [](ScenarioConfig& c, const Field& f) { c.crypto.counter_width = parse_integer<int>(f); }},
      {"post.sample_fraction", [](ScenarioConfig& c, const Field& f) { c.sample_fraction = parse_double(f); }},
      {"post.ec_inefficiency", [](ScenarioConfig& c, const Field& f) { c.ec_inefficiency = parse_double(f); }},
      {"post.epsilon_exponent",
       [](ScenarioConfig& c, const Field& f) { c.epsilon_exponent = parse_integer<unsigned>(f); }},
  };
  return table;
}

void apply(ScenarioConfig& config, const Field& f) {
  const auto it = setters().find(f.key);
  if (it == setters().end()) parse_fail(f, "unknown key");
  it->second(config, f);
}

}  // namespace

ProtocolVariant ScenarioConfig::protocol() const {
  ProtocolVariant v;
  v.tag_width = tag_width_from_bits(tag_bits.value_or(variant == "dense" || variant == "reduced_bandwidth" ? 64 : 128));
  v.reduced_processing = reduced_processing;
  if (variant == "reduced_processing") {
    v.reduced_processing = true;
  } else if (variant == "dense") {
    v.bases_per_tag = xi;
  } else if (variant == "plain") {
    v.scheme = Scheme::PlainBb84;
  } else if (variant == "biased") {
    v.scheme = Scheme::BiasedBb84;
    v.key_basis = key_basis;
    v.bias = bias;
  } else if (variant != "basic" && variant != "reduced_bandwidth") {
    throw Error(ErrorCode::RangeError, "unknown variant '" + variant + "'");
  }
  return v;
}

void ScenarioConfig::validate() const {
  if (tag_bits && *tag_bits != 64 && *tag_bits != 128) {
    throw Error(ErrorCode::RangeError, "tag_bits must be 64 or 128, got " + std::to_string(*tag_bits));
  }
  const ProtocolVariant v = protocol();
  if (variant == "dense" && (xi < kMinBasesPerTag || xi > kMaxBasesPerTag)) {
    throw Error(ErrorCode::RangeError, "dense mode needs xi in [2, 20], got " + std::to_string(xi));
  }
  v.validate();
  channel.validate();
  eve.validate();
  if (pulses == 0) throw Error(ErrorCode::RangeError, "pulses must be positive");
  if (!(channel.clock_hz > 0.0)) throw Error(ErrorCode::RangeError, "clock_hz must be positive");
  if (crypto.iv_bits < 0 || crypto.iv_bits > 64) throw Error(ErrorCode::RangeError, "iv_bits must be in [0, 64]");
  if (crypto.counter_width != -1 && (crypto.counter_width < 1 || crypto.counter_width > 128 - crypto.iv_bits)) {
    throw Error(ErrorCode::RangeError, "counter_width must be in [1, 128 - iv_bits]");
  }
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
    throw Error(ErrorCode::RangeError, "sample_fraction must be in (0, 1]");
  }
  if (!(ec_inefficiency >= 1.0)) throw Error(ErrorCode::RangeError, "ec_inefficiency must be >= 1");
}

ScenarioConfig parse_config(std::string_view text, std::span<const std::string> overrides) {
  ScenarioConfig config;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);

    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorCode::ParseError, where + ": unterminated section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section != "scenario" && section != "channel" && section != "eve" && section != "crypto" &&
          section != "post") {
        throw Error(ErrorCode::ParseError, where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::ParseError, where + ": expected key = value");
    if (section.empty()) throw Error(ErrorCode::ParseError, where + ": key outside any section");
    apply(config, {section + "." + lower(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), where});
  }

  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || o.find('.') > eq) {
      throw Error(ErrorCode::ParseError, "--set " + o + ": expected section.key=value");
    }
    apply(config, {lower(trim(std::string_view(o).substr(0, eq))), std::string(trim(std::string_view(o).substr(eq + 1))),
                   "--set"});
  }
  config.validate();
  return config;
}

ScenarioConfig load_config(const std::string& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

}  // namespace bb84aes
