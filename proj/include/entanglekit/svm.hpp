#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "entanglekit/datagen.hpp"
#include "entanglekit/kernels.hpp"

namespace entanglekit {

/// Soft-margin SVM in dual form. Labels are +1 / -1.
struct SvmModel {
    std::vector<int> support_indices;  // into the training set
    RVector alphas;                    // one per support vector, in (0, C]
    std::vector<int> sv_labels;        // +1 / -1 per support vector
    double bias = 0.0;
    KernelSpec kernel;
    RMatrix support_vectors;  // rows; empty when trained on a bare Gram matrix
    double C = 1.0;
    bool converged = true;
};

struct TrainOptions {
    double C = 1.0;
    double tol = 1e-3;
    // Budget in sweeps; one sweep is n working-set updates.
    long max_passes = 10000;
};

/// SMO with second-order working-set selection on a precomputed Gram
/// matrix. KKT conditions hold to tol on return; when the iteration budget
/// runs out first, the best-so-far model is returned with converged=false.
SvmModel train_on_gram(const RMatrix& gram, const std::vector<int>& y, const TrainOptions& opts);

/// Same, but binds the kernel and stores support vectors for later predict().
SvmModel train(const RMatrix& x_rows, const std::vector<int>& y, const KernelSpec& spec,
               const TrainOptions& opts, int jobs = 1);

struct Prediction {
    int label;        // sign of the decision value, +1 on ties
    double decision;  // sum_i alpha_i y_i k(sv_i, x) + b
};

Prediction predict(const SvmModel& model, const RVector& x);

/// Decision values from a Gram block K(train_i, x_j); rows are indexed by
/// the original training indices the model was trained with.
RVector decision_values(const SvmModel& model, const RMatrix& gram_train_by_x);

/// Dual objective sum(alpha) - 1/2 sum alpha_i alpha_j y_i y_j K_ij
/// for a full alpha vector (test/inspection helper).
double dual_objective(const RMatrix& gram, const std::vector<int>& y, const RVector& alpha);

/// Stratified k-fold with per-class shuffling: (train_idx, val_idx) pairs.
std::vector<std::pair<std::vector<int>, std::vector<int>>> stratified_kfold(
    const std::vector<int>& y, int k, std::uint64_t seed);

struct GridPoint {
    KernelSpec spec;
    double C;
    double mean_accuracy;
    std::vector<double> fold_accuracies;
};

struct GridSearchReport {
    std::vector<GridPoint> evaluated;
    int best_index = -1;
    const GridPoint& best() const { return evaluated[static_cast<size_t>(best_index)]; }
};

/// Kernel specs of the reference sweep: poly degrees 2..7, rbf and sigmoid,
/// each over ten log-spaced gammas in [1e-5, 1e5].
std::vector<KernelSpec> default_kernel_grid();
std::vector<double> default_value_grid();  // the same ten values, used for C

/// Exhaustive (kernel, C) sweep scored by mean k-fold accuracy. One Gram
/// per kernel spec, sliced per fold. Ties break to smaller C, then smaller
/// gamma, then smaller degree, then kind order.
GridSearchReport grid_search(const RMatrix& x_rows, const std::vector<int>& y,
                             const std::vector<KernelSpec>& kernels,
                             const std::vector<double>& c_grid, int k_folds, std::uint64_t seed,
                             int jobs = 1, const TrainOptions& base = TrainOptions{});

/// Per-class accuracy on a three-class test set under the fixed binary
/// mapping SEP -> +1, PPT_ENT and NPPT_ENT -> -1.
struct EvalReport {
    double overall = 0.0;
    double sep = 0.0, ppt = 0.0, nppt = 0.0;
    int n_sep = 0, n_ppt = 0, n_nppt = 0;
};

int binary_label(StateClass c);

EvalReport evaluate(const std::vector<int>& predicted, const std::vector<StateClass>& classes);

}  // namespace entanglekit
