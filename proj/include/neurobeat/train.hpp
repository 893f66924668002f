#pragma once

#include <functional>
#include <string>
#include <vector>

#include "neurobeat/checkpoint.hpp"
#include "neurobeat/dataset.hpp"
#include "neurobeat/model.hpp"

namespace neurobeat {

struct TrainConfig {
  Arch arch{Arch::gru};
  int epochs{50};
  double learning_rate{1e-3};
  int batch_size{32};
  uint64_t seed{0};
  int target_widen_radius{0};  // consumed when the window set is built
  int folds{20};
  double pos_weight{1.0};
  int hidden{0};  // 0 = architecture default (fcn 256, gru 64)
};

// Throws config on out-of-range hyperparameters.
void validate_train_config(const TrainConfig& cfg);

// Test/instrumentation hook: called with every batch before the gradient
// step.
using BatchObserver =
    std::function<void(int epoch, long batch_index, const std::vector<const WindowPair*>&)>;

// Per-epoch progress hook (subject is the fold's held-out id).
using EpochLogger = std::function<void(const std::string& subject, int epoch, double loss)>;

struct FoldOutcome {
  std::string held_out_subject;
  ModelCheckpoint checkpoint;
  std::vector<double> history;  // mean training loss per epoch
  double holdout_loss{0.0};     // mean loss on the held-out subject's windows
};

// Trains one fold from scratch on every window whose subject differs from
// `held_out_subject`: Adam on mean-batch BCE, deterministic Fisher-Yates
// reshuffle each epoch from cfg.seed. Throws insufficient_data if the
// windows span fewer than two subjects or the training split is empty.
FoldOutcome train_fold(const std::vector<WindowPair>& windows,
                       const std::string& held_out_subject, const TrainConfig& cfg,
                       const EpochLogger& logger = {}, const BatchObserver& observer = {});

// Subject-wise k-fold cross-validation: one fold per subject, each held out
// exactly once, fold seed = SplitMix64(cfg.seed XOR fold_index). Requires
// cfg.folds == subject count (throws config otherwise). Folds are
// independent; `threads` > 1 trains them concurrently.
std::vector<FoldOutcome> cross_validate(const TrainingSet& set, const TrainConfig& cfg,
                                        int threads = 1, const EpochLogger& logger = {});

}  // namespace neurobeat
