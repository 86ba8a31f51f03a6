#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "insdel/denoiser.hpp"
#include "insdel/schedule.hpp"
#include "insdel/seq.hpp"
#include "json.hpp"

namespace insdel {

// Fully resolved run settings. Everything a run needs flows from here plus
// the input files; the single seed drives all randomness. Parsing rejects
// unknown keys at every level so config typos fail loudly.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string alphabet = "ABC";
  RateSchedule schedule{};
  std::string pi_source = "uniform";  // uniform | corpus | explicit
  std::vector<double> pi_values;      // only for explicit
  int window = 64;                    // 0 disables windowing
  ContextModelConfig model{};         // alphabet_size derived from alphabet
  TrainConfig train{};
  int corrector_steps = 2;
  int gillespie_k = 1;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load_file(const std::string& path);
  nlohmann::json to_json() const;
  void validate() const;

  // corpus may be null unless pi_source == "corpus"
  InsertionDistribution resolve_pi(const Corpus* corpus) const;
};

// config echo: the resolved settings, written next to each output file
void write_config_echo(const std::string& out_path, const std::string& command,
                       const nlohmann::json& resolved);

}  // namespace insdel
