#include <array>
#include <functional>
#include <future>

#include "bb84aes/error.hpp"
#include "bb84aes/harness.hpp"
#include "bb84aes/post_processing.hpp"

namespace bb84aes {
namespace {

std::uint64_t cell_seed(std::uint64_t root, const std::string& label) { return derive_stream(root, label)(); }

struct Attacked {
  RoundResult round;
  std::optional<EveReport> eve;
};

Attacked attacked_round(const ProtocolVariant& v, const EveStrategy& eve, std::size_t pulses, std::uint64_t seed) {
  RoundConfig rc;
  rc.pulses = pulses;
  rc.channel.qber = 0.0;
  RoundStreams streams = RoundStreams::from_seed(seed);
  EveState state;
  Attacked out{run_round(rc, v, eve, state, streams), std::nullopt};
  if (out.round.public_view.complete) {
    Rng rng = derive_stream(seed, "adversary/finalize");
    out.eve = finalize(eve, state, out.round.public_view, rng);
    score_against(*out.eve, out.round);
  }
  return out;
}

std::int64_t count(std::uint64_t v) { return static_cast<std::int64_t>(v); }

}  // namespace

std::vector<Table1Row> table1(std::uint64_t seed, std::size_t pulses) {
  struct Cell {
    Basis alice, eve;
    bool flip;
    Basis bob;
    double expected;
  };
  // Alice basis, Eve basis, tag replaced, Bob basis, Prob(error).
  static constexpr std::array<Cell, 8> cells = {{
      {Basis::X, Basis::X, false, Basis::X, 0.0},
      {Basis::X, Basis::X, true, Basis::Z, 0.5},
      {Basis::X, Basis::Z, false, Basis::X, 0.5},
      {Basis::X, Basis::Z, true, Basis::Z, 0.5},
      {Basis::Z, Basis::X, false, Basis::Z, 0.5},
      {Basis::Z, Basis::X, true, Basis::Z, 0.5},
      {Basis::Z, Basis::Z, false, Basis::Z, 0.0},
      {Basis::Z, Basis::Z, true, Basis::Z, 0.0},
  }};

  std::vector<std::future<Table1Row>> jobs;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [=] {
      const Cell& c = cells[i];
      RoundConfig rc;
      rc.pulses = pulses;
      rc.channel.qber = 0.0;
      rc.fixed_alice_basis = c.alice;
      RoundStreams streams = RoundStreams::from_seed(cell_seed(seed, "table1/" + std::to_string(i)));
      EveState state;
      const RoundResult r = run_round(rc, ProtocolVariant::reduced_processing_mode(), EveStrategy::blind_tag_flip(c.eve, c.flip),
                                      state, streams);
      std::size_t in_basis = 0;
      for (const PulseRecord& p : r.pulses) in_basis += p.outcome.clicked && p.bob_basis == c.bob;
      return Table1Row{c.alice, c.eve, c.flip, c.bob, c.expected, r.qber,
                       r.clicks == 0 ? 0.0 : static_cast<double>(in_basis) / static_cast<double>(r.clicks), r.clicks};
    }));
  }
  std::vector<Table1Row> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

std::vector<AttackRow> attacks(std::uint64_t seed, std::size_t pulses) {
  using Job = std::function<std::vector<AttackRow>()>;
  const ProtocolVariant aes = ProtocolVariant::basic();
  const ProtocolVariant plain = ProtocolVariant::plain();
  const ProtocolVariant biased = ProtocolVariant::biased(Basis::Z, 0.9);

  std::vector<Job> jobs;

  jobs.emplace_back([=] {
    std::vector<AttackRow> rows;
    const EveStrategy eve = EveStrategy::dos_probe(20.0);
    DoSConfig dc;
    dc.trials = 1000;
    dc.baseline_pulses = pulses;
    dc.channel.qber = 0.0;
    dc.seed = cell_seed(seed, "attack1");
    const DoSReport a = dos_scenario(eve, aes, dc);
    rows.push_back({"attack1_dos_probe", a.defender, "probes_detected", count(a.detected), "probes"});
    rows.push_back({"attack1_dos_probe", a.defender, "detection_latency_groups", count(a.max_latency_groups), "groups"});
    rows.push_back({"attack1_dos_probe", a.defender, "detection_latency_ticks", count(a.max_latency_ticks), "ticks"});
    dc.trials = 3;
    const DoSReport p = dos_scenario(eve, plain, dc);
    rows.push_back({"attack1_dos_probe", p.defender, "probes_detected", count(p.detected), "probes"});
    rows.push_back({"attack1_dos_probe", p.defender, "detection_latency_groups", count(p.max_latency_groups), "groups"});
    rows.push_back({"attack1_dos_probe", p.defender, "detection_latency_ticks", count(p.max_latency_ticks), "ticks"});
    return rows;
  });

  jobs.emplace_back([=] {
    std::vector<AttackRow> rows;
    DoSConfig dc;
    dc.seed = cell_seed(seed, "attack2");
    for (const ProtocolVariant& v : {aes, ProtocolVariant::reduced_bandwidth()}) {
      const DoSReport r = dos_scenario(EveStrategy::key_exhaustion(1000), v, dc);
      rows.push_back({"attack2_key_exhaustion", r.defender, "tags_per_probe", r.tags_per_probe, "tags/probe"});
      rows.push_back({"attack2_key_exhaustion", r.defender, "probes_to_exhaustion",
                      two_sig_figs(r.probes_to_exhaustion.value_or(0.0)), "probes"});
    }
    return rows;
  });

  auto agreement_rows = [=](const std::string& attack, const EveStrategy& eve, const ProtocolVariant& v,
                            const std::string& label) {
    const Attacked a = attacked_round(v, eve, pulses, cell_seed(seed, label));
    std::vector<AttackRow> rows;
    const std::string d = v.name();
    rows.push_back({attack, d, "qber", a.round.qber, "ratio"});
    rows.push_back({attack, d, "detections", count(a.round.detections.size()), "events"});
    if (a.eve) {
      rows.push_back({attack, d, "eve_agreement", a.eve->agreement, "ratio"});
      rows.push_back({attack, d, "eve_key_coverage", a.eve->key_coverage, "ratio"});
      rows.push_back({attack, d, "eve_stored_in_key", count(a.eve->stored_in_key), "photons"});
    }
    return rows;
  };
  for (const auto& [attack, eve] : std::vector<std::pair<std::string, EveStrategy>>{
           {"attack3_pns_memory", EveStrategy::pns_with_memory()},
           {"attack4_intercept_resend", EveStrategy::intercept_resend()},
           {"attack5_pns_three_plus", EveStrategy::pns_three_plus(0.25)}}) {
    jobs.emplace_back([=] { return agreement_rows(attack, eve, plain, attack + "/plain"); });
    jobs.emplace_back([=] { return agreement_rows(attack, eve, aes, attack + "/aes"); });
  }
  jobs.emplace_back([=] {
    return agreement_rows("attack6_pns_no_memory", EveStrategy::pns_no_memory(Basis::Z), biased, "attack6/biased");
  });
  jobs.emplace_back([=] {
    return agreement_rows("attack6_pns_no_memory", EveStrategy::pns_no_memory(Basis::Z), aes, "attack6/aes");
  });

  jobs.emplace_back([=] {
    const ProtocolVariant dense = ProtocolVariant::dense(4, TagWidth::Bits16);
    const GuessTrialReport g = dense_guess_trials(dense, 100000, cell_seed(seed, "dense_guess"));
    return std::vector<AttackRow>{
        {"dense_tag_guess", dense.name(), "acceptance_rate", g.rate, "ratio"},
        {"dense_tag_guess", dense.name(), "expected_acceptance_rate", g.expected_rate, "ratio"},
    };
  });

  std::vector<std::future<std::vector<AttackRow>>> running;
  for (const Job& j : jobs) running.push_back(std::async(std::launch::async, j));
  std::vector<AttackRow> rows;
  for (auto& r : running) {
    auto part = r.get();
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

}  // namespace bb84aes
