#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "insdel/objective.hpp"
#include "insdel/rng.hpp"
#include "insdel/schedule.hpp"
#include "insdel/seq.hpp"

namespace insdel {

// A denoiser maps (noised sequence, remaining insertion count) to a
// distribution over which position to delete next. Predictions are
// deterministic given (input, m, parameters); any window sampling happens
// outside via predict_full.
class DenoiserModel {
 public:
  virtual ~DenoiserModel() = default;
  virtual DeletionDistribution predict(const Sequence& x,
                                       std::int64_t m) const = 0;
};

class UniformDenoiser final : public DenoiserModel {
 public:
  DeletionDistribution predict(const Sequence& x, std::int64_t m) const override;
};

struct ContextModelConfig {
  int alphabet_size = 0;
  int embed_dim = 8;
  int m_buckets = 8;   // bucket(m) = min(floor(log2(m + 1)), m_buckets - 1)
  int hidden_dim = 32;
  int radius = 3;      // letters visible on each side of a position

  int feature_dim() const { return (2 * radius + 1) * embed_dim + embed_dim; }
  void validate() const;
};

// Position scorer: each position sees the letters within `radius`, embedded
// and concatenated (out-of-range slots are zero), plus an embedding of the
// bucketed remaining insertion count; a two-layer tanh network produces a
// scalar score and the deletion distribution is the softmax over positions.
// A zero output layer therefore gives the exact uniform distribution.
class ContextModel final : public DenoiserModel {
 public:
  explicit ContextModel(ContextModelConfig cfg);

  DeletionDistribution predict(const Sequence& x, std::int64_t m) const override;

  // embeddings and first layer random, output layer zero
  void init_params(Rng& rng, double scale = 0.1);

  const ContextModelConfig& config() const { return cfg_; }
  int param_count() const { return static_cast<int>(params_.size()); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  int m_bucket(std::int64_t m) const;

  // offsets into the flat parameter vector
  int off_emb() const { return 0; }
  int off_mbucket() const;
  int off_w1() const;
  int off_b1() const;
  int off_w2() const;
  int off_b2() const;

 private:
  ContextModelConfig cfg_;
  std::vector<double> params_;
};

// One training example: clean sequence, its noised version, the draw weight
// loss_weight(m_t, t), and the window (if any) the model prediction is
// restricted to. window_len = 0 means the model sees the whole sequence.
struct LossSample {
  Sequence x0;
  Sequence x_t;
  std::int64_t m_t = 0;
  double t = 0.0;
  double weight = 1.0;
  int window_start = 0;
  int window_len = 0;
};

LossSample make_loss_sample(const Sequence& x0, double t,
                            const RateSchedule& sched,
                            const InsertionDistribution& pi, int window,
                            Rng& rng);

// Mean over the batch of loss_weight(m_t, t) * cross-entropy between the
// exact deletion target and the model prediction. With grad non-null, the
// gradient of that mean is accumulated into it (size = param_count).
double loss_on_batch(const ContextModel& model,
                     std::span<const LossSample> batch,
                     std::vector<double>* grad = nullptr);

// Same loss for an arbitrary model, evaluation only.
double loss_on_batch(const DenoiserModel& model,
                     std::span<const LossSample> batch);

// Max relative error between analytic gradient and a central finite
// difference over n_coords randomly chosen parameter coordinates.
double gradient_check(const ContextModel& model, const LossSample& sample,
                      int n_coords, double eps, Rng& rng);

struct TrainConfig {
  int steps = 2000;
  int batch_size = 64;
  int sub_batch_size = 16;  // gradient accumulation granularity
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  int window = 64;              // 0 disables windowing
  int checkpoint_interval = 0;  // 0 = no periodic checkpoints
};

struct TraceRow {
  int step = 0;
  double loss = 0.0;
  double seconds = 0.0;  // wallclock since training start; diagnostic only
};

struct TrainResult {
  std::vector<TraceRow> trace;
};

// Adam on the batched loss. Per step: draw batch_size clean sequences with
// replacement, noise each at t ~ U(0,1), drop m_t = 0 draws, sort by |x_t|,
// accumulate gradients over sub-batches, one optimizer step. All randomness
// comes from cfg.seed.
TrainResult train(ContextModel& model, const Corpus& data,
                  const RateSchedule& sched, const InsertionDistribution& pi,
                  const TrainConfig& cfg,
                  const std::function<void(const ContextModel&, int)>&
                      on_checkpoint = {});

// Model prediction lifted to the full sequence: direct when the input fits
// in the window (or window = 0); otherwise a uniformly chosen window is
// cropped out, scored in isolation, and lifted via windowed_distribution.
DeletionDistribution predict_full(const DenoiserModel& model,
                                  const Sequence& x, std::int64_t m,
                                  int window, Rng& rng);

struct CheckpointMeta {
  std::string alphabet;
  RateSchedule schedule;
  std::vector<double> pi;
  int window = 64;
};

// Versioned single-line JSON header followed by the flat parameter vector as
// little-endian float64. Round trip is bit-exact.
void save_checkpoint(const std::string& path, const ContextModel& model,
                     const CheckpointMeta& meta);

struct LoadedCheckpoint {
  ContextModel model;
  CheckpointMeta meta;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace insdel
