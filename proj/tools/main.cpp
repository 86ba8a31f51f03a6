#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "insdel/align.hpp"
#include "insdel/config.hpp"
#include "insdel/denoiser.hpp"
#include "insdel/forward.hpp"
#include "insdel/objective.hpp"
#include "insdel/rng.hpp"
#include "insdel/sampler.hpp"
#include "insdel/scorer.hpp"
#include "insdel/seq.hpp"
#include "selftest.hpp"

namespace insdel {
namespace {

// round-trip-exact float formatting shared by every table writer
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() &&
         s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

Corpus read_corpus(const std::string& path, const Alphabet& a) {
  if (ends_with(path, ".txt")) return parse_txt_file(path, a);
  return parse_fasta_file(path, a);
}

void write_corpus(const std::string& path, const Corpus& c) {
  if (path.empty()) {
    write_fasta(std::cout, c);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  if (ends_with(path, ".txt"))
    write_txt(out, c);
  else
    write_fasta(out, c);
}

void write_text(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << body;
}

// config echo goes next to file outputs; runs that print to stdout have no
// natural sibling path and skip it
void maybe_echo(const std::string& out_path, const std::string& command,
                const RunConfig& cfg) {
  if (!out_path.empty()) write_config_echo(out_path, command, cfg.to_json());
}

std::string join_argv(int argc, char** argv) {
  std::string s;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) s += ' ';
    s += argv[i];
  }
  return s;
}

RunConfig config_from_checkpoint(const CheckpointMeta& meta,
                                 std::uint64_t seed) {
  RunConfig cfg;
  cfg.seed = seed;
  cfg.alphabet = meta.alphabet;
  cfg.schedule = meta.schedule;
  cfg.pi_source = "explicit";
  cfg.pi_values = meta.pi;
  cfg.window = meta.window;
  cfg.model.alphabet_size = static_cast<int>(meta.alphabet.size());
  return cfg;
}

struct ToygenArgs {
  int n = 1000;
  int max_len = 20;
  std::uint64_t seed = 1;
  std::string out;
};

int run_toygen(const ToygenArgs& a, const std::string& command) {
  if (a.n < 1 || a.max_len < 1)
    throw std::runtime_error("toygen: --n and --max-len must be >= 1");
  Rng rng(a.seed);
  const Corpus c = toy_corpus(a.n, a.max_len, rng);
  write_corpus(a.out, c);
  RunConfig cfg;
  cfg.seed = a.seed;
  maybe_echo(a.out, command, cfg);
  return 0;
}

struct TrainArgs {
  std::string config;
  std::string data;
  std::string val;
  std::string out;
  RunConfig cfg;  // after overrides
};

int run_train(const TrainArgs& a, const std::string& command) {
  RunConfig cfg = a.cfg;
  cfg.model.alphabet_size = static_cast<int>(cfg.alphabet.size());
  cfg.train.window = cfg.window;
  cfg.validate();

  const Alphabet alphabet(cfg.alphabet);
  const Corpus data = read_corpus(a.data, alphabet);
  if (data.size() == 0) throw std::runtime_error("train: empty corpus");
  const InsertionDistribution pi = cfg.resolve_pi(&data);

  ContextModel model(cfg.model);
  Rng init_rng(mix_seed(cfg.seed, 0));
  model.init_params(init_rng);

  TrainConfig tc = cfg.train;
  tc.seed = mix_seed(cfg.seed, 1);

  const CheckpointMeta meta{cfg.alphabet, cfg.schedule, pi.p, cfg.window};
  const auto result =
      train(model, data, cfg.schedule, pi, tc,
            [&](const ContextModel& m, int step) {
              save_checkpoint(a.out + ".step-" + std::to_string(step), m, meta);
            });
  save_checkpoint(a.out, model, meta);

  std::string trace = "step\tloss\tseconds\n";
  for (const auto& row : result.trace)
    trace += std::to_string(row.step) + '\t' + fmt(row.loss) + '\t' +
             fmt(row.seconds) + '\n';
  write_text(a.out + ".trace.tsv", trace);
  maybe_echo(a.out, command, cfg);

  std::printf("trained %d steps, final loss %s\n", tc.steps,
              result.trace.empty() ? "n/a" : fmt(result.trace.back().loss).c_str());

  if (!a.val.empty()) {
    const Corpus val = read_corpus(a.val, alphabet);
    Rng rng(mix_seed(cfg.seed, 2));
    double total_nll = 0.0;
    std::int64_t total_len = 0;
    for (const auto& x : val.sequences) {
      const auto rep = elbo(x, model, cfg.schedule, pi, 20, cfg.window, rng);
      total_nll += rep.nll_per_token * x.size();
      total_len += x.size();
    }
    const double nll = total_nll / static_cast<double>(total_len);
    std::printf("validation nll/token %s, perplexity %s\n", fmt(nll).c_str(),
                fmt(std::exp(nll)).c_str());
  }
  return 0;
}

struct PerplexityArgs {
  std::string model;
  std::string data;
  int n_samples = 50;
  std::uint64_t seed = 1;
  std::string out;
};

int run_perplexity(const PerplexityArgs& a, const std::string& command) {
  if (a.n_samples < 1)
    throw std::runtime_error("perplexity: --n-samples must be >= 1");
  const LoadedCheckpoint ck = load_checkpoint(a.model);
  const Alphabet alphabet(ck.meta.alphabet);
  const InsertionDistribution pi = InsertionDistribution::explicit_probs(ck.meta.pi);
  const Corpus data = read_corpus(a.data, alphabet);
  if (data.size() == 0) throw std::runtime_error("perplexity: empty corpus");

  Rng rng(a.seed);
  nlohmann::json per_seq = nlohmann::json::array();
  double total_nll = 0.0, prior_sum = 0.0, denoise_sum = 0.0;
  std::int64_t total_len = 0;
  for (const auto& x : data.sequences) {
    const auto rep = elbo(x, ck.model, ck.meta.schedule, pi, a.n_samples,
                          ck.meta.window, rng);
    per_seq.push_back({{"id", x.id},
                       {"length", x.size()},
                       {"prior_kl", rep.prior_kl},
                       {"denoising_term", rep.denoising_term},
                       {"nll_per_token", rep.nll_per_token},
                       {"perplexity", rep.perplexity}});
    total_nll += rep.nll_per_token * x.size();
    prior_sum += rep.prior_kl;
    denoise_sum += rep.denoising_term;
    total_len += x.size();
  }
  const double nll = total_nll / static_cast<double>(total_len);
  const nlohmann::json report = {
      {"n_sequences", data.size()},
      {"n_samples", a.n_samples},
      {"prior_kl_mean", prior_sum / data.size()},
      {"denoising_term_mean", denoise_sum / data.size()},
      {"nll_per_token", nll},
      {"perplexity", std::exp(nll)},
      {"per_sequence", per_seq}};
  write_text(a.out, report.dump(2) + "\n");
  maybe_echo(a.out, command, config_from_checkpoint(ck.meta, a.seed));
  return 0;
}

struct GenerateArgs {
  std::string model;
  int length = 0;
  int n = 1;
  int corrector_steps = 2;
  std::uint64_t seed = 1;
  std::string out;
};

int run_generate(const GenerateArgs& a, const std::string& command) {
  if (a.length < 1) throw std::runtime_error("generate: --length must be >= 1");
  if (a.n < 1) throw std::runtime_error("generate: --n must be >= 1");
  if (a.corrector_steps < 0)
    throw std::runtime_error("generate: --corrector-steps must be >= 0");
  const LoadedCheckpoint ck = load_checkpoint(a.model);
  const InsertionDistribution pi = InsertionDistribution::explicit_probs(ck.meta.pi);

  Rng rng(a.seed);
  Corpus out{Alphabet(ck.meta.alphabet), {}};
  for (int i = 0; i < a.n; ++i) {
    Sequence x = generate(a.length, ck.model, ck.meta.schedule, pi,
                          a.corrector_steps, ck.meta.window, rng);
    x.id = "gen-" + std::to_string(i);
    out.sequences.push_back(std::move(x));
  }
  write_corpus(a.out, out);
  RunConfig cfg = config_from_checkpoint(ck.meta, a.seed);
  cfg.corrector_steps = a.corrector_steps;
  maybe_echo(a.out, command, cfg);
  return 0;
}

struct ShrinkArgs {
  std::string model;
  std::string in;
  std::int64_t m = 0;
  double frac = 0.0;
  std::string mode = "sample";
  int k = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::string trace;
};

int run_shrink(const ShrinkArgs& a, const std::string& command) {
  if ((a.m > 0) == (a.frac > 0.0))
    throw std::runtime_error("shrink: give exactly one of --m or --frac");
  if (a.frac >= 1.0)
    throw std::runtime_error("shrink: --frac must be in (0, 1)");
  if (a.mode != "sample" && a.mode != "greedy")
    throw std::runtime_error("shrink: --mode must be sample or greedy");
  if (a.k < 1) throw std::runtime_error("shrink: --k must be >= 1");
  if (a.k > 1 && a.mode == "greedy")
    throw std::runtime_error("shrink: --k > 1 requires --mode sample");

  const LoadedCheckpoint ck = load_checkpoint(a.model);
  const Alphabet alphabet(ck.meta.alphabet);
  const Corpus in = read_corpus(a.in, alphabet);

  Rng rng(a.seed);
  Corpus out{alphabet, {}};
  std::string trace = "id\tstep\tposition\tletter\tlog_prob\n";
  for (const auto& x : in.sequences) {
    // deletions rounded up when given as a fraction of the length, but never
    // the whole sequence; length-1 records pass through untouched
    std::int64_t m = a.m;
    if (a.frac > 0.0) {
      m = static_cast<std::int64_t>(
          std::ceil(a.frac * static_cast<double>(x.size())));
      m = std::min<std::int64_t>(m, x.size() - 1);
      if (m < 1) {
        out.sequences.push_back(x);
        continue;
      }
    }
    const auto mode = a.mode == "greedy" ? ShrinkMode::greedy : ShrinkMode::sample;
    auto [shrunk, tr] =
        a.k > 1 ? shrink_k(x, m, ck.model, a.k, ck.meta.window, rng)
                : shrink(x, m, ck.model, mode, ck.meta.window, rng);
    shrunk.id = x.id;
    for (std::size_t s = 0; s < tr.steps.size(); ++s)
      trace += x.id + '\t' + std::to_string(s) + '\t' +
               std::to_string(tr.steps[s].position) + '\t' +
               alphabet.symbol(tr.steps[s].letter) + '\t' +
               fmt(tr.steps[s].log_prob) + '\n';
    out.sequences.push_back(std::move(shrunk));
  }
  write_corpus(a.out, out);
  if (!a.trace.empty()) write_text(a.trace, trace);
  RunConfig cfg = config_from_checkpoint(ck.meta, a.seed);
  cfg.gillespie_k = a.k;
  maybe_echo(a.out, command, cfg);
  return 0;
}

struct ScoreArgs {
  std::string model;
  std::string in;
  std::string out;
};

int run_score(const ScoreArgs& a, const std::string& command) {
  const LoadedCheckpoint ck = load_checkpoint(a.model);
  const Alphabet alphabet(ck.meta.alphabet);
  const Corpus in = read_corpus(a.in, alphabet);

  std::string tsv = "id\tposition\tletter\tlog_prob\n";
  for (const auto& x : in.sequences) {
    if (x.size() < 2) {
      std::fprintf(stderr, "score: skipping %s (needs length >= 2)\n",
                   x.id.c_str());
      continue;
    }
    const ScoreTable table = score_single_deletions(x, ck.model);
    for (const auto& e : table.entries)
      tsv += x.id + '\t' + std::to_string(e.position) + '\t' +
             alphabet.symbol(e.letter) + '\t' + fmt(e.log_prob) + '\n';
  }
  write_text(a.out, tsv);
  maybe_echo(a.out, command, config_from_checkpoint(ck.meta, 1));
  return 0;
}

struct ScoreSetArgs {
  std::string model;
  std::string in;
  std::vector<int> positions;
  std::string sets;     // json array of position arrays
  std::string mutant;   // subsequence whose deletion set is derived by diff
  int max_exact = 5;
  int n_mc = 10000;
  std::uint64_t seed = 1;
  std::string out;
};

// deletion set turning x into the mutant: complement of the leftmost
// embedding (any embedding yields the same letters, the leftmost makes the
// set canonical)
std::vector<int> diff_deletion_set(const Sequence& x, const Sequence& mut) {
  if (mut.size() >= x.size())
    throw std::runtime_error("score-set: mutant must be strictly shorter");
  std::vector<int> out;
  int j = 0;
  for (int i = 0; i < x.size(); ++i) {
    if (j < mut.size() && x[i] == mut[j])
      ++j;
    else
      out.push_back(i);
  }
  if (j != mut.size())
    throw std::runtime_error("score-set: mutant is not a subsequence");
  return out;
}

int run_score_set(const ScoreSetArgs& a, const std::string& command) {
  const int given = (!a.positions.empty()) + (!a.sets.empty()) + (!a.mutant.empty());
  if (given != 1)
    throw std::runtime_error(
        "score-set: give exactly one of --positions, --sets, --mutant");
  const LoadedCheckpoint ck = load_checkpoint(a.model);
  const Alphabet alphabet(ck.meta.alphabet);
  const Corpus in = read_corpus(a.in, alphabet);
  if (in.size() != 1)
    throw std::runtime_error("score-set: input must hold exactly one sequence");
  const Sequence& x = in.sequences[0];

  std::vector<std::vector<int>> sets;
  if (!a.positions.empty()) {
    sets.push_back(a.positions);
  } else if (!a.mutant.empty()) {
    sets.push_back(diff_deletion_set(x, Sequence::from_string(a.mutant, alphabet)));
  } else {
    std::ifstream f(a.sets);
    if (!f) throw std::runtime_error("cannot open: " + a.sets);
    const auto j = nlohmann::json::parse(f);
    if (!j.is_array())
      throw std::runtime_error("score-set: --sets must hold a json array of arrays");
    for (const auto& s : j) sets.push_back(s.get<std::vector<int>>());
  }

  Rng rng(a.seed);
  std::string tsv = "set\tlog_prob\tmethod\n";
  for (const auto& set : sets) {
    const SetScore score =
        score_deletion_set(x, set, ck.model, a.max_exact, a.n_mc, rng);
    std::string key;
    for (std::size_t i = 0; i < set.size(); ++i)
      key += (i ? "," : "") + std::to_string(set[i]);
    tsv += key + '\t' + fmt(score.log_prob) + '\t' +
           (score.exact ? "exact" : "mc") + '\n';
  }
  write_text(a.out, tsv);
  maybe_echo(a.out, command, config_from_checkpoint(ck.meta, a.seed));
  return 0;
}

struct SimulateArgs {
  std::string in;
  std::string alphabet = "ABC";
  double t = 0.5;
  int n = 1;
  std::string mode = "closed";
  std::uint64_t seed = 1;
  std::string out;
  std::string fasta;  // optional: also dump the noised sequences
};

int run_simulate(const SimulateArgs& a, const std::string& command) {
  if (a.t < 0.0 || a.t > 1.0)
    throw std::runtime_error("simulate-forward: --t must be in [0, 1]");
  if (a.n < 1) throw std::runtime_error("simulate-forward: --n must be >= 1");
  if (a.mode != "closed" && a.mode != "event")
    throw std::runtime_error("simulate-forward: --mode must be closed or event");

  RunConfig cfg;
  cfg.seed = a.seed;
  cfg.alphabet = a.alphabet;
  cfg.validate();
  const Alphabet alphabet(cfg.alphabet);
  const Corpus in = read_corpus(a.in, alphabet);
  const InsertionDistribution pi = cfg.resolve_pi(nullptr);

  Rng rng(a.seed);
  std::string tsv = "id\tdraw\tt\tm_t\tlength\tgap_sizes\n";
  Corpus noised{alphabet, {}};
  for (const auto& x : in.sequences)
    for (int i = 0; i < a.n; ++i) {
      Sequence draw;
      std::vector<std::int64_t> gaps;
      if (a.mode == "closed") {
        // same law as the one-shot sampler, drawn through the pieces that
        // expose the gap structure
        const std::int64_t m =
            sample_insertion_count(x.size(), cfg.schedule, a.t, rng);
        gaps = sample_uniform_composition(m, x.size() + 1, rng);
        for (int slot = 0; slot <= x.size(); ++slot) {
          for (std::int64_t g = 0; g < gaps[slot]; ++g)
            draw.letters.push_back(static_cast<std::uint8_t>(pi.sample(rng)));
          if (slot < x.size()) draw.letters.push_back(x[slot]);
        }
      } else {
        BirthPath p = simulate_pure_birth(x, a.t, cfg.schedule, pi, rng);
        gaps = std::move(p.gap_sizes);
        draw = std::move(p.x_t);
      }
      std::int64_t m = 0;
      std::string gap_list;
      for (std::size_t g = 0; g < gaps.size(); ++g) {
        m += gaps[g];
        gap_list += (g ? "," : "") + std::to_string(gaps[g]);
      }
      tsv += x.id + '\t' + std::to_string(i) + '\t' + fmt(a.t) + '\t' +
             std::to_string(m) + '\t' + std::to_string(draw.size()) + '\t' +
             gap_list + '\n';
      if (!a.fasta.empty()) {
        draw.id = x.id + "|draw=" + std::to_string(i) + "|m=" + std::to_string(m);
        noised.sequences.push_back(std::move(draw));
      }
    }
  write_text(a.out, tsv);
  if (!a.fasta.empty()) write_fasta_file(a.fasta, noised);
  maybe_echo(a.out, command, cfg);
  return 0;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"deletion-denoising sequence toolkit"};
  app.require_subcommand(1);
  const std::string command = join_argv(argc, argv);

  auto* c_selftest = app.add_subcommand(
      "selftest", "run the built-in oracle checks and report PASS/FAIL");
  std::uint64_t selftest_seed = 1;
  c_selftest->add_option("--seed", selftest_seed, "base seed for the checks");

  auto* c_toygen =
      app.add_subcommand("toygen", "write a synthetic alternating-A/B corpus");
  ToygenArgs toygen;
  c_toygen->add_option("--n", toygen.n, "number of sequences");
  c_toygen->add_option("--max-len", toygen.max_len, "maximum sequence length");
  c_toygen->add_option("--seed", toygen.seed, "rng seed");
  c_toygen->add_option("--out", toygen.out, "output path (.fasta/.txt), default stdout");

  auto* c_train =
      app.add_subcommand("train", "fit the position scorer on a corpus");
  TrainArgs train_args;
  c_train->add_option("--config", train_args.config, "run config json");
  c_train->add_option("--data", train_args.data, "training corpus")->required();
  c_train->add_option("--val", train_args.val, "held-out corpus for a final report");
  c_train->add_option("--out", train_args.out, "checkpoint path")->required();
  std::uint64_t train_seed = 0;
  int train_steps = 0, train_batch = 0, train_sub_batch = 0, train_window = -1,
      train_interval = -1;
  double train_lr = 0.0;
  std::string train_alphabet, train_pi;
  auto* o_seed = c_train->add_option("--seed", train_seed, "overrides config seed");
  auto* o_steps = c_train->add_option("--steps", train_steps);
  auto* o_batch = c_train->add_option("--batch-size", train_batch);
  auto* o_sub = c_train->add_option("--sub-batch-size", train_sub_batch);
  auto* o_lr = c_train->add_option("--lr", train_lr);
  auto* o_window = c_train->add_option("--window", train_window, "0 disables windowing");
  auto* o_interval = c_train->add_option("--checkpoint-interval", train_interval);
  auto* o_alpha = c_train->add_option("--alphabet", train_alphabet);
  auto* o_pi = c_train->add_option("--pi", train_pi, "uniform | corpus");

  auto* c_perp = app.add_subcommand(
      "perplexity", "stochastic likelihood bound on a corpus");
  PerplexityArgs perp;
  c_perp->add_option("--model", perp.model, "checkpoint")->required();
  c_perp->add_option("--data", perp.data, "corpus to evaluate")->required();
  c_perp->add_option("--n-samples", perp.n_samples, "noise draws per sequence");
  c_perp->add_option("--seed", perp.seed, "rng seed");
  c_perp->add_option("--out", perp.out, "report json path, default stdout");

  auto* c_gen = app.add_subcommand("generate", "sample new sequences");
  GenerateArgs gen;
  c_gen->add_option("--model", gen.model, "checkpoint")->required();
  c_gen->add_option("--length", gen.length, "target length")->required();
  c_gen->add_option("--n", gen.n, "number of samples");
  c_gen->add_option("--corrector-steps", gen.corrector_steps,
                    "delete+reinsert rounds per net deletion");
  c_gen->add_option("--seed", gen.seed, "rng seed");
  c_gen->add_option("--out", gen.out, "output path, default stdout");

  auto* c_shrink = app.add_subcommand(
      "shrink", "remove letters from real sequences via the model");
  ShrinkArgs shrink_args;
  c_shrink->add_option("--model", shrink_args.model, "checkpoint")->required();
  c_shrink->add_option("--in", shrink_args.in, "input corpus")->required();
  c_shrink->add_option("--m", shrink_args.m, "letters to delete");
  c_shrink->add_option("--frac", shrink_args.frac,
                       "fraction of letters to delete (rounded up)");
  c_shrink->add_option("--mode", shrink_args.mode, "sample | greedy");
  c_shrink->add_option("--k", shrink_args.k, "deletions per model call");
  c_shrink->add_option("--seed", shrink_args.seed, "rng seed");
  c_shrink->add_option("--out", shrink_args.out, "output path, default stdout");
  c_shrink->add_option("--trace", shrink_args.trace, "per-step deletion tsv");

  auto* c_score = app.add_subcommand(
      "score", "log-probability table of every single deletion");
  ScoreArgs score;
  c_score->add_option("--model", score.model, "checkpoint")->required();
  c_score->add_option("--in", score.in, "input corpus")->required();
  c_score->add_option("--out", score.out, "tsv path, default stdout");

  auto* c_set = app.add_subcommand(
      "score-set", "log-probability that the model deletes a position set");
  ScoreSetArgs set_args;
  c_set->add_option("--model", set_args.model, "checkpoint")->required();
  c_set->add_option("--in", set_args.in, "single-sequence input")->required();
  c_set->add_option("--positions", set_args.positions,
                    "comma-separated 0-based positions")
      ->delimiter(',');
  c_set->add_option("--sets", set_args.sets, "json file: array of position arrays");
  c_set->add_option("--mutant", set_args.mutant,
                    "deletion set inferred from this subsequence");
  c_set->add_option("--max-exact", set_args.max_exact,
                    "largest set scored by exact ordering sum");
  c_set->add_option("--mc-samples", set_args.n_mc, "orderings sampled beyond that");
  c_set->add_option("--seed", set_args.seed, "rng seed");
  c_set->add_option("--out", set_args.out, "report json path, default stdout");

  auto* c_sim = app.add_subcommand(
      "simulate-forward", "draw noised versions of input sequences");
  SimulateArgs sim;
  c_sim->add_option("--in", sim.in, "input corpus")->required();
  c_sim->add_option("--alphabet", sim.alphabet, "symbol set");
  c_sim->add_option("--t", sim.t, "noise time in [0, 1]");
  c_sim->add_option("--n", sim.n, "draws per input sequence");
  c_sim->add_option("--mode", sim.mode, "closed | event");
  c_sim->add_option("--seed", sim.seed, "rng seed");
  c_sim->add_option("--out", sim.out, "TSV output path, default stdout");
  c_sim->add_option("--fasta", sim.fasta, "also write noised sequences here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*c_selftest) return run_selftest(selftest_seed);
  if (*c_toygen) return run_toygen(toygen, command);
  if (*c_train) {
    RunConfig cfg = train_args.config.empty()
                        ? RunConfig{}
                        : RunConfig::load_file(train_args.config);
    if (o_seed->count()) cfg.seed = train_seed;
    if (o_steps->count()) cfg.train.steps = train_steps;
    if (o_batch->count()) cfg.train.batch_size = train_batch;
    if (o_sub->count()) cfg.train.sub_batch_size = train_sub_batch;
    if (o_lr->count()) cfg.train.learning_rate = train_lr;
    if (o_window->count()) cfg.window = train_window;
    if (o_interval->count()) cfg.train.checkpoint_interval = train_interval;
    if (o_alpha->count()) cfg.alphabet = train_alphabet;
    if (o_pi->count()) cfg.pi_source = train_pi;
    train_args.cfg = cfg;
    return run_train(train_args, command);
  }
  if (*c_perp) return run_perplexity(perp, command);
  if (*c_gen) return run_generate(gen, command);
  if (*c_shrink) return run_shrink(shrink_args, command);
  if (*c_score) return run_score(score, command);
  if (*c_set) return run_score_set(set_args, command);
  if (*c_sim) return run_simulate(sim, command);
  return 1;
}

}  // namespace
}  // namespace insdel

int main(int argc, char** argv) {
  try {
    return insdel::dispatch(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
