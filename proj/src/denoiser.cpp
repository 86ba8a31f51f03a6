#include "insdel/denoiser.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "insdel/align.hpp"
#include "json.hpp"

namespace insdel {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_predict_args(const Sequence& x, std::int64_t m) {
  if (x.empty()) throw std::invalid_argument("predict: empty sequence");
  if (m < 1) throw std::invalid_argument("predict: nothing to denoise");
}

double log_sum_exp(std::span<const double> v) {
  double mx = kNegInf;
  for (double s : v) mx = std::max(mx, s);
  double acc = 0.0;
  for (double s : v) acc += std::exp(s - mx);
  return mx + std::log(acc);
}

}  // namespace

DeletionDistribution UniformDenoiser::predict(const Sequence& x,
                                              std::int64_t m) const {
  check_predict_args(x, m);
  return DeletionDistribution::uniform(x.size());
}

void ContextModelConfig::validate() const {
  if (alphabet_size < 1 || embed_dim < 1 || m_buckets < 1 || hidden_dim < 1 ||
      radius < 0)
    throw std::invalid_argument("context model: bad dimensions");
}

ContextModel::ContextModel(ContextModelConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const int f = cfg_.feature_dim();
  const int count = cfg_.alphabet_size * cfg_.embed_dim +
                    cfg_.m_buckets * cfg_.embed_dim + cfg_.hidden_dim * f +
                    cfg_.hidden_dim + cfg_.hidden_dim + 1;
  params_.assign(count, 0.0);
}

int ContextModel::off_mbucket() const {
  return cfg_.alphabet_size * cfg_.embed_dim;
}
int ContextModel::off_w1() const {
  return off_mbucket() + cfg_.m_buckets * cfg_.embed_dim;
}
int ContextModel::off_b1() const {
  return off_w1() + cfg_.hidden_dim * cfg_.feature_dim();
}
int ContextModel::off_w2() const { return off_b1() + cfg_.hidden_dim; }
int ContextModel::off_b2() const { return off_w2() + cfg_.hidden_dim; }

int ContextModel::m_bucket(std::int64_t m) const {
  const auto b = static_cast<int>(
      std::floor(std::log2(static_cast<double>(m) + 1.0)));
  return std::min(b, cfg_.m_buckets - 1);
}

void ContextModel::init_params(Rng& rng, double scale) {
  for (double& p : params_) p = scale * rng.normal();
  // zero output layer: the freshly initialized model is exactly uniform
  for (int i = off_w2(); i < param_count(); ++i) params_[i] = 0.0;
}

namespace {

// per-position activations; hidden/feats are kept only when a backward pass
// will follow
struct Activations {
  std::vector<double> scores;  // n
  std::vector<double> hidden;  // n * h (or h scratch)
  std::vector<double> feats;   // n * f (or f scratch)
};

void forward_scores(const ContextModel& model, const Sequence& x,
                    std::int64_t m, bool keep, Activations& act) {
  const auto& cfg = model.config();
  const int n = x.size();
  const int d = cfg.embed_dim;
  const int h = cfg.hidden_dim;
  const int f = cfg.feature_dim();
  const int r = cfg.radius;
  const double* par = model.params().data();
  const double* emb = par + model.off_emb();
  const double* mrow = par + model.off_mbucket() +
                       static_cast<std::size_t>(model.m_bucket(m)) * d;
  const double* w1 = par + model.off_w1();
  const double* b1 = par + model.off_b1();
  const double* w2 = par + model.off_w2();
  const double b2 = par[model.off_b2()];

  act.scores.assign(n, 0.0);
  act.hidden.assign(keep ? static_cast<std::size_t>(n) * h : h, 0.0);
  act.feats.assign(keep ? static_cast<std::size_t>(n) * f : f, 0.0);

  for (int i = 0; i < n; ++i) {
    double* feat =
        act.feats.data() + (keep ? static_cast<std::size_t>(i) * f : 0);
    for (int o = 0; o <= 2 * r; ++o) {
      const int pos = i + o - r;
      double* dst = feat + o * d;
      if (pos >= 0 && pos < n)
        std::memcpy(dst, emb + static_cast<std::size_t>(x[pos]) * d,
                    sizeof(double) * d);
      else
        std::fill(dst, dst + d, 0.0);
    }
    std::memcpy(feat + (2 * r + 1) * d, mrow, sizeof(double) * d);

    double* hid =
        act.hidden.data() + (keep ? static_cast<std::size_t>(i) * h : 0);
    double score = b2;
    for (int j = 0; j < h; ++j) {
      const double* row = w1 + static_cast<std::size_t>(j) * f;
      double pre = b1[j];
      for (int c = 0; c < f; ++c) pre += row[c] * feat[c];
      const double a = std::tanh(pre);
      hid[j] = a;
      score += w2[j] * a;
    }
    act.scores[i] = score;
  }
}

// weighted cross-entropy of one sample; with grad != nullptr its gradient is
// added into grad (unnormalized, caller divides by the batch size)
double sample_loss(const ContextModel& model, const LossSample& ls,
                   std::vector<double>* grad, Activations& act) {
  if (ls.m_t < 1) throw std::invalid_argument("loss: sample has m_t < 1");
  const int n_full = ls.x_t.size();
  const bool windowed = ls.window_len > 0 && ls.window_len < n_full;
  const int ws = windowed ? ls.window_start : 0;
  const int wl = windowed ? ls.window_len : n_full;
  if (ws < 0 || ws + wl > n_full)
    throw std::invalid_argument("loss: window out of range");

  const auto target = target_distribution(ls.x0, ls.x_t);

  Sequence view;
  const Sequence* input = &ls.x_t;
  if (windowed) {
    view.letters.assign(ls.x_t.letters.begin() + ws,
                        ls.x_t.letters.begin() + ws + wl);
    input = &view;
  }

  forward_scores(model, *input, ls.m_t, grad != nullptr, act);
  const double lse = log_sum_exp(act.scores);

  // in-window positions carry log q = score - lse + log(wl/n_full); the rest
  // get the fixed out-of-window mass 1/n_full
  const double log_scale =
      windowed ? std::log(static_cast<double>(wl)) -
                     std::log(static_cast<double>(n_full))
               : 0.0;
  const double log_out = -std::log(static_cast<double>(n_full));

  double ce = 0.0;
  double p_in = 0.0;  // target mass inside the window
  for (int l = 0; l < n_full; ++l) {
    const double lp = target.log_probs[l];
    if (lp == kNegInf) continue;
    const double p = std::exp(lp);
    if (l >= ws && l < ws + wl) {
      ce -= p * (act.scores[l - ws] - lse + log_scale);
      p_in += p;
    } else {
      ce -= p * log_out;
    }
  }

  if (grad) {
    const auto& cfg = model.config();
    const int n = input->size();
    const int d = cfg.embed_dim;
    const int h = cfg.hidden_dim;
    const int f = cfg.feature_dim();
    const int r = cfg.radius;
    const double* par = model.params().data();
    const double* w1 = par + model.off_w1();
    const double* w2 = par + model.off_w2();
    double* g = grad->data();
    double* g_emb = g + model.off_emb();
    double* g_m = g + model.off_mbucket() +
                  static_cast<std::size_t>(model.m_bucket(ls.m_t)) * d;
    double* g_w1 = g + model.off_w1();
    double* g_b1 = g + model.off_b1();
    double* g_w2 = g + model.off_w2();
    double* g_b2 = g + model.off_b2();

    std::vector<double> dfeat(f);
    for (int i = 0; i < n; ++i) {
      const double sigma = std::exp(act.scores[i] - lse);
      const double tgt = target.log_probs[ws + i] == kNegInf
                             ? 0.0
                             : std::exp(target.log_probs[ws + i]);
      const double dscore = ls.weight * (sigma * p_in - tgt);
      if (dscore == 0.0) continue;
      const double* hid = act.hidden.data() + static_cast<std::size_t>(i) * h;
      const double* feat = act.feats.data() + static_cast<std::size_t>(i) * f;

      *g_b2 += dscore;
      std::fill(dfeat.begin(), dfeat.end(), 0.0);
      for (int j = 0; j < h; ++j) {
        g_w2[j] += dscore * hid[j];
        const double dh = dscore * w2[j];
        const double dp = dh * (1.0 - hid[j] * hid[j]);
        if (dp == 0.0) continue;
        g_b1[j] += dp;
        const double* row = w1 + static_cast<std::size_t>(j) * f;
        double* grow = g_w1 + static_cast<std::size_t>(j) * f;
        for (int c = 0; c < f; ++c) {
          grow[c] += dp * feat[c];
          dfeat[c] += dp * row[c];
        }
      }
      for (int o = 0; o <= 2 * r; ++o) {
        const int pos = i + o - r;
        if (pos < 0 || pos >= n) continue;
        double* erow =
            g_emb + static_cast<std::size_t>((*input)[pos]) * d;
        const double* src = dfeat.data() + o * d;
        for (int c = 0; c < d; ++c) erow[c] += src[c];
      }
      const double* src = dfeat.data() + (2 * r + 1) * d;
      for (int c = 0; c < d; ++c) g_m[c] += src[c];
    }
  }

  return ls.weight * ce;
}

}  // namespace

DeletionDistribution ContextModel::predict(const Sequence& x,
                                           std::int64_t m) const {
  check_predict_args(x, m);
  for (auto l : x.letters)
    if (l >= cfg_.alphabet_size)
      throw std::invalid_argument("predict: letter outside model alphabet");
  Activations act;
  forward_scores(*this, x, m, false, act);
  const double lse = log_sum_exp(act.scores);
  DeletionDistribution d{std::move(act.scores)};
  for (double& lp : d.log_probs) lp -= lse;
  return d;
}

double loss_on_batch(const ContextModel& model,
                     std::span<const LossSample> batch,
                     std::vector<double>* grad) {
  if (batch.empty()) throw std::invalid_argument("loss: empty batch");
  if (grad) grad->assign(model.param_count(), 0.0);
  Activations act;
  double total = 0.0;
  for (const auto& ls : batch) total += sample_loss(model, ls, grad, act);
  const double inv = 1.0 / static_cast<double>(batch.size());
  if (grad)
    for (double& g : *grad) g *= inv;
  return total * inv;
}

double loss_on_batch(const DenoiserModel& model,
                     std::span<const LossSample> batch) {
  if (batch.empty()) throw std::invalid_argument("loss: empty batch");
  double total = 0.0;
  for (const auto& ls : batch) {
    const auto target = target_distribution(ls.x0, ls.x_t);
    const int n_full = ls.x_t.size();
    const bool windowed = ls.window_len > 0 && ls.window_len < n_full;
    DeletionDistribution q;
    if (windowed) {
      Sequence view;
      view.letters.assign(ls.x_t.letters.begin() + ls.window_start,
                          ls.x_t.letters.begin() + ls.window_start +
                              ls.window_len);
      q = windowed_distribution(model.predict(view, ls.m_t), ls.window_start,
                                n_full);
    } else {
      q = model.predict(ls.x_t, ls.m_t);
    }
    double ce = 0.0;
    for (int l = 0; l < n_full; ++l) {
      const double lp = target.log_probs[l];
      if (lp == kNegInf) continue;
      ce -= std::exp(lp) * q.log_probs[l];
    }
    total += ls.weight * ce;
  }
  return total / static_cast<double>(batch.size());
}

LossSample make_loss_sample(const Sequence& x0, double t,
                            const RateSchedule& sched,
                            const InsertionDistribution& pi, int window,
                            Rng& rng) {
  LossSample ls;
  ls.x0 = x0;
  ls.t = t;
  NoisedSample ns = sample_xt(x0, t, sched, pi, rng);
  ls.m_t = ns.m_t;
  ls.x_t = std::move(ns.x_t);
  if (ls.m_t > 0) ls.weight = sched.loss_weight(ls.m_t, t);
  if (window > 0 && ls.x_t.size() > window) {
    ls.window_start = static_cast<int>(rng.below(ls.x_t.size() - window + 1));
    ls.window_len = window;
  }
  return ls;
}

double gradient_check(const ContextModel& model, const LossSample& sample,
                      int n_coords, double eps, Rng& rng) {
  std::vector<double> grad;
  const std::span<const LossSample> batch(&sample, 1);
  loss_on_batch(model, batch, &grad);

  ContextModel probe = model;
  auto par = probe.params();
  double worst = 0.0;
  for (int c = 0; c < n_coords; ++c) {
    const auto idx = static_cast<std::size_t>(rng.below(probe.param_count()));
    const double saved = par[idx];
    par[idx] = saved + eps;
    const double up = loss_on_batch(probe, batch);
    par[idx] = saved - eps;
    const double down = loss_on_batch(probe, batch);
    par[idx] = saved;
    const double fd = (up - down) / (2.0 * eps);
    const double rel = std::abs(grad[idx] - fd) /
                       std::max({std::abs(grad[idx]), std::abs(fd), 1e-4});
    worst = std::max(worst, rel);
  }
  return worst;
}

TrainResult train(ContextModel& model, const Corpus& data,
                  const RateSchedule& sched, const InsertionDistribution& pi,
                  const TrainConfig& cfg,
                  const std::function<void(const ContextModel&, int)>&
                      on_checkpoint) {
  if (data.sequences.empty()) throw std::invalid_argument("train: empty corpus");
  for (const auto& s : data.sequences)
    if (s.empty())
      throw std::invalid_argument("train: empty sequence in corpus");
  if (cfg.steps < 1 || cfg.batch_size < 1 || cfg.sub_batch_size < 1)
    throw std::invalid_argument("train: bad config");

  Rng rng(cfg.seed);
  const int np = model.param_count();
  std::vector<double> grad(np, 0.0), chunk_grad(np, 0.0);
  std::vector<double> adam_m(np, 0.0), adam_v(np, 0.0);
  const double b1 = 0.9, b2 = 0.999, adam_eps = 1e-8;
  // tail average: the gradient noise is heavy-tailed (the draw weight blows
  // up as t -> 1), so a single endpoint is a lottery ticket; averaging the
  // last quarter of the trajectory gives a reproducibly sharp model
  const int avg_from = cfg.steps - cfg.steps / 4 + 1;
  std::vector<double> avg(np, 0.0);
  std::int64_t avg_count = 0;

  TrainResult result;
  result.trace.reserve(cfg.steps);
  const auto start = std::chrono::steady_clock::now();

  std::vector<LossSample> batch;
  Activations act;
  for (int step = 1; step <= cfg.steps; ++step) {
    batch.clear();
    for (int b = 0; b < cfg.batch_size; ++b) {
      const auto& x0 = data.sequences[rng.below(data.size())];
      const double t = rng.u01();
      LossSample ls = make_loss_sample(x0, t, sched, pi, cfg.window, rng);
      if (ls.m_t == 0) continue;  // zero weight, zero loss
      batch.push_back(std::move(ls));
    }

    double loss = 0.0;
    if (!batch.empty()) {
      std::stable_sort(batch.begin(), batch.end(),
                       [](const LossSample& a, const LossSample& b) {
                         return a.x_t.size() < b.x_t.size();
                       });
      std::fill(grad.begin(), grad.end(), 0.0);
      double loss_sum = 0.0;
      for (std::size_t lo = 0; lo < batch.size(); lo += cfg.sub_batch_size) {
        const std::size_t hi =
            std::min(batch.size(), lo + static_cast<std::size_t>(cfg.sub_batch_size));
        std::fill(chunk_grad.begin(), chunk_grad.end(), 0.0);
        for (std::size_t i = lo; i < hi; ++i)
          loss_sum += sample_loss(model, batch[i], &chunk_grad, act);
        for (int p = 0; p < np; ++p) grad[p] += chunk_grad[p];
      }
      const double inv = 1.0 / static_cast<double>(batch.size());
      loss = loss_sum * inv;

      auto par = model.params();
      const double c1 = 1.0 - std::pow(b1, step);
      const double c2 = 1.0 - std::pow(b2, step);
      // cosine decay to 5% of the base rate; late steps polish the softmax
      // tails, which is what sampled rollouts are sensitive to
      const double progress = static_cast<double>(step - 1) / cfg.steps;
      const double lr = cfg.learning_rate *
                        (0.05 + 0.95 * 0.5 * (1.0 + std::cos(kPi * progress)));
      for (int p = 0; p < np; ++p) {
        const double g = grad[p] * inv;
        adam_m[p] = b1 * adam_m[p] + (1.0 - b1) * g;
        adam_v[p] = b2 * adam_v[p] + (1.0 - b2) * g * g;
        par[p] -= lr * (adam_m[p] / c1) / (std::sqrt(adam_v[p] / c2) + adam_eps);
      }
    }

    if (step >= avg_from) {
      const auto par = model.params();
      for (int p = 0; p < np; ++p) avg[p] += par[p];
      ++avg_count;
    }

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    result.trace.push_back({step, loss, secs});
    if (cfg.checkpoint_interval > 0 && on_checkpoint &&
        step % cfg.checkpoint_interval == 0)
      on_checkpoint(model, step);
  }
  if (avg_count > 0) {
    auto par = model.params();
    for (int p = 0; p < np; ++p) par[p] = avg[p] / static_cast<double>(avg_count);
  }
  return result;
}

DeletionDistribution predict_full(const DenoiserModel& model,
                                  const Sequence& x, std::int64_t m,
                                  int window, Rng& rng) {
  if (window <= 0 || x.size() <= window) return model.predict(x, m);
  const int ws = static_cast<int>(rng.below(x.size() - window + 1));
  Sequence view;
  view.letters.assign(x.letters.begin() + ws, x.letters.begin() + ws + window);
  return windowed_distribution(model.predict(view, m), ws, x.size());
}

namespace {

void write_u64_le(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64_le(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ContextModel& model,
                     const CheckpointMeta& meta) {
  nlohmann::json header;
  header["format"] = "insdel-checkpoint";
  header["version"] = 1;
  header["alphabet"] = meta.alphabet;
  header["schedule"] = {{"gamma", meta.schedule.gamma},
                        {"t_max", meta.schedule.t_max}};
  header["pi"] = meta.pi;
  header["window"] = meta.window;
  const auto& cfg = model.config();
  header["model"] = {{"embed_dim", cfg.embed_dim},
                     {"m_buckets", cfg.m_buckets},
                     {"hidden_dim", cfg.hidden_dim},
                     {"radius", cfg.radius}};
  header["param_count"] = model.param_count();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << header.dump() << '\n';
  for (double p : model.params()) write_u64_le(out, std::bit_cast<std::uint64_t>(p));
  if (!out) throw std::runtime_error("write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("checkpoint: missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw std::runtime_error("checkpoint: malformed header");
  }
  if (header.value("format", "") != "insdel-checkpoint" ||
      header.value("version", 0) != 1)
    throw std::runtime_error("checkpoint: unknown format or version");

  CheckpointMeta meta;
  meta.alphabet = header.at("alphabet").get<std::string>();
  meta.schedule.gamma = header.at("schedule").at("gamma").get<double>();
  meta.schedule.t_max = header.at("schedule").at("t_max").get<double>();
  meta.pi = header.at("pi").get<std::vector<double>>();
  meta.window = header.at("window").get<int>();
  meta.schedule.validate();

  ContextModelConfig cfg;
  cfg.alphabet_size = static_cast<int>(meta.alphabet.size());
  cfg.embed_dim = header.at("model").at("embed_dim").get<int>();
  cfg.m_buckets = header.at("model").at("m_buckets").get<int>();
  cfg.hidden_dim = header.at("model").at("hidden_dim").get<int>();
  cfg.radius = header.at("model").at("radius").get<int>();

  ContextModel model(cfg);
  const auto count = header.at("param_count").get<int>();
  if (count != model.param_count())
    throw std::runtime_error("checkpoint: parameter count mismatch");
  auto par = model.params();
  for (int i = 0; i < count; ++i) {
    par[i] = std::bit_cast<double>(read_u64_le(in));
    if (!in) throw std::runtime_error("checkpoint: truncated parameters");
  }
  return {std::move(model), std::move(meta)};
}

}  // namespace insdel
