#include "neurobeat/train.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "neurobeat/adam.hpp"
#include "neurobeat/error.hpp"
#include "neurobeat/parallel.hpp"
#include "neurobeat/rng.hpp"

namespace neurobeat {

void validate_train_config(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw error(errc::config, "epochs must be >= 1");
  if (cfg.batch_size < 1) throw error(errc::config, "batch size must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw error(errc::config, "learning rate must be > 0");
  if (cfg.folds < 1) throw error(errc::config, "folds must be >= 1");
  if (cfg.target_widen_radius < 0) throw error(errc::config, "widen radius must be >= 0");
  if (!(cfg.pos_weight > 0.0)) throw error(errc::config, "positive weight must be > 0");
  if (cfg.hidden < 0) throw error(errc::config, "hidden size must be >= 0");
}

namespace {

ModelDims resolve_dims(const TrainConfig& cfg, const WindowPair& sample) {
  ModelDims dims = default_dims(cfg.arch);
  dims.input_channels = static_cast<int>(sample.eeg.rows());
  dims.window_len = static_cast<int>(sample.eeg.cols());
  if (cfg.hidden > 0) dims.hidden = cfg.hidden;
  return dims;
}

double mean_loss(const std::vector<const WindowPair*>& windows, Arch arch,
                 const ModelDims& dims, const Eigen::VectorXd& params, int batch_size,
                 double pos_weight) {
  Eigen::VectorXd scratch;
  double total = 0.0;
  long done = 0;
  while (done < static_cast<long>(windows.size())) {
    long take = std::min<long>(batch_size, static_cast<long>(windows.size()) - done);
    std::vector<const WindowPair*> batch(windows.begin() + done, windows.begin() + done + take);
    total += model_loss_and_gradient(arch, dims, params, batch, scratch, pos_weight) *
             static_cast<double>(take);
    done += take;
  }
  return total / static_cast<double>(windows.size());
}

}  // namespace

FoldOutcome train_fold(const std::vector<WindowPair>& windows,
                       const std::string& held_out_subject, const TrainConfig& cfg,
                       const EpochLogger& logger, const BatchObserver& observer) {
  validate_train_config(cfg);
  std::set<std::string> subjects;
  for (const auto& w : windows) subjects.insert(w.subject_id);
  if (subjects.size() < 2) {
    throw error(errc::insufficient_data,
                "training requires windows from at least two subjects");
  }

  std::vector<const WindowPair*> train_set, holdout_set;
  for (const auto& w : windows) {
    (w.subject_id == held_out_subject ? holdout_set : train_set).push_back(&w);
  }
  if (train_set.empty()) {
    throw error(errc::insufficient_data, "no training windows left after holding out '" +
                                             held_out_subject + "'");
  }

  ModelDims dims = resolve_dims(cfg, *train_set.front());
  SplitMix64 rng{cfg.seed};
  Eigen::VectorXd params = init_params(cfg.arch, dims, rng.next_u64());
  AdamState opt(params.size());
  Eigen::VectorXd grad(params.size());

  long n = static_cast<long>(train_set.size());
  std::vector<long> order(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;

  FoldOutcome outcome;
  outcome.held_out_subject = held_out_subject;
  outcome.history.reserve(static_cast<size_t>(cfg.epochs));
  std::vector<const WindowPair*> batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Deterministic Fisher-Yates reshuffle per epoch.
    for (long i = n - 1; i >= 1; --i) {
      long j = static_cast<long>(rng.next_below(static_cast<uint64_t>(i + 1)));
      std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    }
    double epoch_loss = 0.0;
    long batch_index = 0;
    for (long start = 0; start < n; start += cfg.batch_size) {
      long take = std::min<long>(cfg.batch_size, n - start);
      batch.clear();
      for (long i = 0; i < take; ++i) {
        batch.push_back(train_set[static_cast<size_t>(order[static_cast<size_t>(start + i)])]);
      }
      if (observer) observer(epoch, batch_index, batch);
      double loss =
          model_loss_and_gradient(cfg.arch, dims, params, batch, grad, cfg.pos_weight);
      adam_step(params, grad, opt, cfg.learning_rate);
      epoch_loss += loss * static_cast<double>(take);
      ++batch_index;
    }
    outcome.history.push_back(epoch_loss / static_cast<double>(n));
    if (logger) logger(held_out_subject, epoch, outcome.history.back());
  }

  outcome.checkpoint.arch = cfg.arch;
  outcome.checkpoint.dims = dims;
  outcome.checkpoint.seed = cfg.seed;
  outcome.checkpoint.epochs = cfg.epochs;
  outcome.checkpoint.weights = std::move(params);
  outcome.holdout_loss =
      holdout_set.empty() ? 0.0
                          : mean_loss(holdout_set, cfg.arch, dims, outcome.checkpoint.weights,
                                      cfg.batch_size, cfg.pos_weight);
  return outcome;
}

std::vector<FoldOutcome> cross_validate(const TrainingSet& set, const TrainConfig& cfg,
                                        int threads, const EpochLogger& logger) {
  validate_train_config(cfg);
  if (set.subject_ids.empty()) throw error(errc::insufficient_data, "no subjects in dataset");
  if (cfg.folds != static_cast<int>(set.subject_ids.size())) {
    std::ostringstream msg;
    msg << "folds (" << cfg.folds << ") must equal the subject count ("
        << set.subject_ids.size() << ")";
    throw error(errc::config, msg.str());
  }

  std::vector<FoldOutcome> folds(set.subject_ids.size());
  parallel_for(static_cast<long>(set.subject_ids.size()), threads, [&](long fold) {
    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = derive_seed(cfg.seed, static_cast<uint64_t>(fold));
    try {
      folds[static_cast<size_t>(fold)] = train_fold(
          set.windows, set.subject_ids[static_cast<size_t>(fold)], fold_cfg, logger);
    } catch (const error& e) {
      std::ostringstream msg;
      msg << "fold " << fold << " (held-out " << set.subject_ids[static_cast<size_t>(fold)]
          << "): " << e.what();
      throw error(e.code(), msg.str());
    }
  });
  return folds;
}

}  // namespace neurobeat
