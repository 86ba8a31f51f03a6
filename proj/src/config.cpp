#include "insdel/config.hpp"

#include <fstream>
#include <stdexcept>

namespace insdel {

namespace {

void reject_unknown(const nlohmann::json& j, const char* where,
                    std::initializer_list<const char*> known) {
  if (!j.is_object())
    throw std::invalid_argument(std::string("config: ") + where +
                                " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw std::invalid_argument(std::string("config: unknown key \"") + key +
                                  "\" in " + where);
  }
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  reject_unknown(j, "config",
                 {"seed", "alphabet", "schedule", "pi", "window", "model",
                  "train", "sampler"});
  c.seed = j.value("seed", c.seed);
  c.alphabet = j.value("alphabet", c.alphabet);
  if (j.contains("schedule")) {
    const auto& s = j.at("schedule");
    reject_unknown(s, "schedule", {"gamma", "t_max"});
    c.schedule.gamma = s.value("gamma", c.schedule.gamma);
    c.schedule.t_max = s.value("t_max", c.schedule.t_max);
  }
  if (j.contains("pi")) {
    const auto& p = j.at("pi");
    reject_unknown(p, "pi", {"source", "values"});
    c.pi_source = p.value("source", c.pi_source);
    if (p.contains("values"))
      c.pi_values = p.at("values").get<std::vector<double>>();
  }
  c.window = j.value("window", c.window);
  if (j.contains("model")) {
    const auto& m = j.at("model");
    reject_unknown(m, "model",
                   {"embed_dim", "m_buckets", "hidden_dim", "radius"});
    c.model.embed_dim = m.value("embed_dim", c.model.embed_dim);
    c.model.m_buckets = m.value("m_buckets", c.model.m_buckets);
    c.model.hidden_dim = m.value("hidden_dim", c.model.hidden_dim);
    c.model.radius = m.value("radius", c.model.radius);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    reject_unknown(t, "train",
                   {"steps", "batch_size", "sub_batch_size", "learning_rate",
                    "checkpoint_interval"});
    c.train.steps = t.value("steps", c.train.steps);
    c.train.batch_size = t.value("batch_size", c.train.batch_size);
    c.train.sub_batch_size = t.value("sub_batch_size", c.train.sub_batch_size);
    c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
    c.train.checkpoint_interval =
        t.value("checkpoint_interval", c.train.checkpoint_interval);
  }
  if (j.contains("sampler")) {
    const auto& s = j.at("sampler");
    reject_unknown(s, "sampler", {"corrector_steps", "gillespie_k"});
    c.corrector_steps = s.value("corrector_steps", c.corrector_steps);
    c.gillespie_k = s.value("gillespie_k", c.gillespie_k);
  }
  c.train.seed = c.seed;
  c.train.window = c.window;
  c.model.alphabet_size = static_cast<int>(c.alphabet.size());
  c.validate();
  return c;
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config: invalid JSON in " + path + ": " +
                             e.what());
  }
  return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["alphabet"] = alphabet;
  j["schedule"] = {{"gamma", schedule.gamma}, {"t_max", schedule.t_max}};
  j["pi"] = {{"source", pi_source}};
  if (pi_source == "explicit") j["pi"]["values"] = pi_values;
  j["window"] = window;
  j["model"] = {{"embed_dim", model.embed_dim},
                {"m_buckets", model.m_buckets},
                {"hidden_dim", model.hidden_dim},
                {"radius", model.radius}};
  j["train"] = {{"steps", train.steps},
                {"batch_size", train.batch_size},
                {"sub_batch_size", train.sub_batch_size},
                {"learning_rate", train.learning_rate},
                {"checkpoint_interval", train.checkpoint_interval}};
  j["sampler"] = {{"corrector_steps", corrector_steps},
                  {"gillespie_k", gillespie_k}};
  return j;
}

void RunConfig::validate() const {
  Alphabet a(alphabet);  // throws on empty/duplicate/unprintable
  schedule.validate();
  if (pi_source != "uniform" && pi_source != "corpus" &&
      pi_source != "explicit")
    throw std::invalid_argument(
        "config: pi.source must be uniform, corpus, or explicit");
  if (pi_source == "explicit") {
    if (static_cast<int>(pi_values.size()) != a.size())
      throw std::invalid_argument(
          "config: explicit pi must have one value per alphabet symbol");
    InsertionDistribution{pi_values}.validate();
  }
  if (window < 0) throw std::invalid_argument("config: window must be >= 0");
  ContextModelConfig m = model;
  m.alphabet_size = a.size();
  m.validate();
  if (train.steps < 1 || train.batch_size < 1 || train.sub_batch_size < 1)
    throw std::invalid_argument("config: train sizes must be >= 1");
  if (!(train.learning_rate > 0.0))
    throw std::invalid_argument("config: learning_rate must be > 0");
  if (train.checkpoint_interval < 0)
    throw std::invalid_argument("config: checkpoint_interval must be >= 0");
  if (corrector_steps < 0)
    throw std::invalid_argument("config: corrector_steps must be >= 0");
  if (gillespie_k < 1)
    throw std::invalid_argument("config: gillespie_k must be >= 1");
}

InsertionDistribution RunConfig::resolve_pi(const Corpus* corpus) const {
  if (pi_source == "uniform")
    return InsertionDistribution::uniform(static_cast<int>(alphabet.size()));
  if (pi_source == "explicit")
    return InsertionDistribution::explicit_probs(pi_values);
  if (!corpus)
    throw std::invalid_argument("config: pi.source=corpus needs input data");
  return InsertionDistribution::from_corpus(*corpus);
}

void write_config_echo(const std::string& out_path, const std::string& command,
                       const nlohmann::json& resolved) {
  nlohmann::json echo = resolved;
  echo["command"] = command;
  std::ofstream out(out_path + ".config.json");
  if (!out)
    throw std::runtime_error("cannot write " + out_path + ".config.json");
  out << echo.dump(2) << '\n';
}

}  // namespace insdel
