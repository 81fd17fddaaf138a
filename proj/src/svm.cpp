#include "entanglekit/svm.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

namespace entanglekit {

namespace {

constexpr double kTau = 1e-12;  // curvature floor for the pair objective

/// Working-set SMO (second-order selection) on Q_ij = y_i y_j K_ij.
/// Gradient of 1/2 a'Qa - e'a is G_i = (Qa)_i - 1.
struct SmoSolver {
    const RMatrix& k;
    const std::vector<int>& y;
    const double c;
    const double tol;
    RVector alpha;
    RVector grad;

    SmoSolver(const RMatrix& gram, const std::vector<int>& labels, double C, double tolerance)
        : k(gram), y(labels), c(C), tol(tolerance) {
        const auto n = static_cast<Eigen::Index>(y.size());
        alpha = RVector::Zero(n);
        grad = RVector::Constant(n, -1.0);
    }

    bool in_up(Eigen::Index i) const {
        return (y[static_cast<size_t>(i)] > 0 && alpha[i] < c) ||
               (y[static_cast<size_t>(i)] < 0 && alpha[i] > 0);
    }
    bool in_low(Eigen::Index i) const {
        return (y[static_cast<size_t>(i)] > 0 && alpha[i] > 0) ||
               (y[static_cast<size_t>(i)] < 0 && alpha[i] < c);
    }

    // Returns false when the stopping condition m(alpha) - M(alpha) <= tol holds.
    bool select_pair(Eigen::Index& out_i, Eigen::Index& out_j) const {
        const Eigen::Index n = alpha.size();
        Eigen::Index i = -1;
        double m_up = -std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < n; ++t) {
            if (!in_up(t)) continue;
            const double v = -y[static_cast<size_t>(t)] * grad[t];
            if (v > m_up) {
                m_up = v;
                i = t;
            }
        }
        if (i < 0) return false;

        double m_low = std::numeric_limits<double>::infinity();
        Eigen::Index j = -1;
        double best_gain = 0.0;
        for (Eigen::Index t = 0; t < n; ++t) {
            if (!in_low(t)) continue;
            const double v = -y[static_cast<size_t>(t)] * grad[t];
            m_low = std::min(m_low, v);
            const double b = m_up - v;
            if (b <= 0.0) continue;
            // Curvature along the feasible pair direction; label-free:
            // ||phi(x_i) - phi(x_t)||^2 in feature space.
            double a = k(i, i) + k(t, t) - 2.0 * k(i, t);
            if (a < kTau) a = kTau;
            const double gain = b * b / a;
            if (gain > best_gain) {
                best_gain = gain;
                j = t;
            }
        }
        if (j < 0 || m_up - m_low <= tol) return false;
        out_i = i;
        out_j = j;
        return true;
    }

    void update_pair(Eigen::Index i, Eigen::Index j) {
        const double yi = y[static_cast<size_t>(i)], yj = y[static_cast<size_t>(j)];
        double a = k(i, i) + k(j, j) - 2.0 * k(i, j);
        if (a < kTau) a = kTau;
        const double b = -yi * grad[i] + yj * grad[j];
        // Step delta > 0 moves alpha_i along +y_i and alpha_j along -y_j,
        // which keeps sum(y alpha) fixed; cap it at the box walls.
        double delta = b / a;
        const double old_i = alpha[i], old_j = alpha[j];
        const double room_i = (yi > 0) ? c - old_i : old_i;
        const double room_j = (yj > 0) ? old_j : c - old_j;
        delta = std::min(delta, std::min(room_i, room_j));
        if (delta <= 0.0) return;
        const double ai = old_i + yi * delta;
        const double aj = old_j - yj * delta;

        const double di = ai - old_i, dj = aj - old_j;
        alpha[i] = ai;
        alpha[j] = aj;
        const Eigen::Index n = alpha.size();
        for (Eigen::Index t = 0; t < n; ++t)
            grad[t] += y[static_cast<size_t>(t)] *
                       (yi * di * k(i, t) + yj * dj * k(j, t));
    }

    // Bias from free support vectors, midpoint of the violating pair bounds
    // when none are free. For a free vector, y_i f(x_i) = 1 means
    // b = -y_i G_i evaluated at the solution.
    double bias() const {
        double sum = 0.0;
        int free_count = 0;
        const Eigen::Index n = alpha.size();
        for (Eigen::Index t = 0; t < n; ++t) {
            if (alpha[t] > 0.0 && alpha[t] < c) {
                sum += -y[static_cast<size_t>(t)] * grad[t];
                ++free_count;
            }
        }
        if (free_count > 0) return sum / free_count;
        double m_up = -std::numeric_limits<double>::infinity();
        double m_low = std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < n; ++t) {
            const double v = -y[static_cast<size_t>(t)] * grad[t];
            if (in_up(t)) m_up = std::max(m_up, v);
            if (in_low(t)) m_low = std::min(m_low, v);
        }
        if (!std::isfinite(m_up)) return m_low;
        if (!std::isfinite(m_low)) return m_up;
        return (m_up + m_low) / 2.0;
    }
};

}  // namespace

SvmModel train_on_gram(const RMatrix& gram, const std::vector<int>& y, const TrainOptions& opts) {
    const auto n = static_cast<Eigen::Index>(y.size());
    if (gram.rows() != n || gram.cols() != n)
        throw DimensionError("train_on_gram: gram must be n x n for n labels");
    if (opts.C <= 0.0) throw ContractViolation("train_on_gram: C must be positive");
    for (int label : y)
        if (label != 1 && label != -1)
            throw ContractViolation("train_on_gram: labels must be +1/-1");

    SmoSolver solver(gram, y, opts.C, opts.tol);
    const long budget = opts.max_passes * std::max<long>(1, n);
    bool converged = false;
    Eigen::Index i = 0, j = 0;
#ifndef NDEBUG
    double prev_obj = 0.0;  // objective at alpha = 0
#endif
    for (long it = 0; it < budget; ++it) {
        if (!solver.select_pair(i, j)) {
            converged = true;
            break;
        }
        solver.update_pair(i, j);
#ifndef NDEBUG
        // W(alpha) = sum(alpha) - 1/2 a'Qa; with grad = Qa - e this is
        // (sum(alpha) - alpha.grad)/2.
        const double obj = 0.5 * (solver.alpha.sum() - solver.alpha.dot(solver.grad));
        assert(obj >= prev_obj - 1e-9 && "SMO dual objective must not decrease");
        prev_obj = obj;
#endif
    }

    SvmModel model;
    model.C = opts.C;
    model.bias = solver.bias();
    model.converged = converged;
    for (Eigen::Index t = 0; t < n; ++t) {
        if (solver.alpha[t] > 0.0) {
            model.support_indices.push_back(static_cast<int>(t));
            model.sv_labels.push_back(y[static_cast<size_t>(t)]);
        }
    }
    model.alphas.resize(static_cast<Eigen::Index>(model.support_indices.size()));
    for (size_t s = 0; s < model.support_indices.size(); ++s)
        model.alphas[static_cast<Eigen::Index>(s)] = solver.alpha[model.support_indices[s]];
    return model;
}

SvmModel train(const RMatrix& x_rows, const std::vector<int>& y, const KernelSpec& spec,
               const TrainOptions& opts, int jobs) {
    spec.validate();
    SvmModel model = train_on_gram(gram_matrix(spec, x_rows, jobs), y, opts);
    model.kernel = spec;
    model.support_vectors.resize(static_cast<Eigen::Index>(model.support_indices.size()),
                                 x_rows.cols());
    for (size_t s = 0; s < model.support_indices.size(); ++s)
        model.support_vectors.row(static_cast<Eigen::Index>(s)) =
            x_rows.row(model.support_indices[s]);
    return model;
}

Prediction predict(const SvmModel& model, const RVector& x) {
    if (model.support_vectors.rows() !=
        static_cast<Eigen::Index>(model.support_indices.size()))
        throw ContractViolation("predict: model does not carry support vectors");
    double decision = model.bias;
    for (Eigen::Index s = 0; s < model.support_vectors.rows(); ++s)
        decision += model.alphas[s] * model.sv_labels[static_cast<size_t>(s)] *
                    kernel_eval(model.kernel, model.support_vectors.row(s), x);
    return {decision < 0.0 ? -1 : 1, decision};
}

RVector decision_values(const SvmModel& model, const RMatrix& gram_train_by_x) {
    RVector out = RVector::Constant(gram_train_by_x.cols(), model.bias);
    for (size_t s = 0; s < model.support_indices.size(); ++s) {
        const int idx = model.support_indices[s];
        if (idx >= gram_train_by_x.rows())
            throw DimensionError("decision_values: gram block is missing training rows");
        out += model.alphas[static_cast<Eigen::Index>(s)] * model.sv_labels[s] *
               gram_train_by_x.row(idx).transpose();
    }
    return out;
}

double dual_objective(const RMatrix& gram, const std::vector<int>& y, const RVector& alpha) {
    const Eigen::Index n = alpha.size();
    double quad = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            quad += alpha[i] * alpha[j] * y[static_cast<size_t>(i)] * y[static_cast<size_t>(j)] *
                    gram(i, j);
    return alpha.sum() - 0.5 * quad;
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> stratified_kfold(
    const std::vector<int>& y, int k, std::uint64_t seed) {
    if (k < 2) throw ContractViolation("stratified_kfold: k must be >= 2");
    std::map<int, std::vector<int>> by_class;
    for (size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(static_cast<int>(i));

    std::vector<std::vector<int>> folds(static_cast<size_t>(k));
    for (auto& [label, idx] : by_class) {
        if (static_cast<int>(idx.size()) < k)
            throw StratificationError("class " + std::to_string(label) + " has fewer than k samples");
        RandomStream rng(substream_seed(seed, {static_cast<std::uint64_t>(label + 1000)}));
        for (size_t i = idx.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(rng.uniform() * static_cast<double>(i));
            std::swap(idx[i - 1], idx[std::min(j, i - 1)]);
        }
        // Contiguous chunks with the remainder spread over the first folds.
        const size_t base = idx.size() / static_cast<size_t>(k);
        const size_t rem = idx.size() % static_cast<size_t>(k);
        size_t pos = 0;
        for (int f = 0; f < k; ++f) {
            const size_t len = base + (static_cast<size_t>(f) < rem ? 1 : 0);
            for (size_t t = 0; t < len; ++t) folds[static_cast<size_t>(f)].push_back(idx[pos++]);
        }
    }

    std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
    for (int f = 0; f < k; ++f) {
        std::vector<int> val = folds[static_cast<size_t>(f)];
        std::sort(val.begin(), val.end());
        std::vector<int> train;
        for (int g = 0; g < k; ++g)
            if (g != f)
                train.insert(train.end(), folds[static_cast<size_t>(g)].begin(),
                             folds[static_cast<size_t>(g)].end());
        std::sort(train.begin(), train.end());
        out.emplace_back(std::move(train), std::move(val));
    }
    return out;
}

std::vector<double> default_value_grid() {
    std::vector<double> v;
    for (int i = 0; i < 10; ++i) v.push_back(std::pow(10.0, -5.0 + 10.0 * i / 9.0));
    return v;
}

std::vector<KernelSpec> default_kernel_grid() {
    std::vector<KernelSpec> grid;
    const auto gammas = default_value_grid();
    for (int degree = 2; degree <= 7; ++degree)
        for (double g : gammas) grid.push_back({KernelKind::Poly, g, degree});
    for (double g : gammas) grid.push_back({KernelKind::Rbf, g, 2});
    for (double g : gammas) grid.push_back({KernelKind::Sigmoid, g, 2});
    return grid;
}

namespace {

int kind_rank(KernelKind k) {
    switch (k) {
        case KernelKind::Amplitude: return 0;
        case KernelKind::Poly: return 1;
        case KernelKind::Rbf: return 2;
        case KernelKind::Sigmoid: return 3;
    }
    return 4;
}

bool better_point(const GridPoint& a, const GridPoint& b) {
    if (a.mean_accuracy != b.mean_accuracy) return a.mean_accuracy > b.mean_accuracy;
    if (a.C != b.C) return a.C < b.C;
    if (a.spec.gamma != b.spec.gamma) return a.spec.gamma < b.spec.gamma;
    if (a.spec.degree != b.spec.degree) return a.spec.degree < b.spec.degree;
    return kind_rank(a.spec.kind) < kind_rank(b.spec.kind);
}

}  // namespace

GridSearchReport grid_search(const RMatrix& x_rows, const std::vector<int>& y,
                             const std::vector<KernelSpec>& kernels,
                             const std::vector<double>& c_grid, int k_folds, std::uint64_t seed,
                             int jobs, const TrainOptions& base) {
    if (kernels.empty() || c_grid.empty())
        throw ContractViolation("grid_search: grids must be nonempty");
    const auto folds = stratified_kfold(y, k_folds, seed);

    GridSearchReport report;
    report.evaluated.resize(kernels.size() * c_grid.size());

    const int nthreads = std::max(1, jobs);
    std::vector<std::thread> pool;
    std::vector<std::string> errors(static_cast<size_t>(nthreads));
    auto work = [&](int w) {
        try {
            for (size_t ks = static_cast<size_t>(w); ks < kernels.size();
                 ks += static_cast<size_t>(nthreads)) {
                const KernelSpec& spec = kernels[ks];
                const RMatrix gram = gram_matrix(spec, x_rows, 1);
                // Fold slices are reused across every C.
                std::vector<RMatrix> fold_train_gram, fold_val_gram;
                std::vector<std::vector<int>> fold_train_y;
                std::vector<std::vector<int>> fold_val_y;
                for (const auto& [tr, va] : folds) {
                    RMatrix tg(tr.size(), tr.size());
                    for (size_t a = 0; a < tr.size(); ++a)
                        for (size_t b = 0; b < tr.size(); ++b)
                            tg(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                                gram(tr[a], tr[b]);
                    RMatrix vg(tr.size(), va.size());
                    for (size_t a = 0; a < tr.size(); ++a)
                        for (size_t b = 0; b < va.size(); ++b)
                            vg(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                                gram(tr[a], va[b]);
                    fold_train_gram.push_back(std::move(tg));
                    fold_val_gram.push_back(std::move(vg));
                    std::vector<int> ty, vy;
                    for (int t : tr) ty.push_back(y[static_cast<size_t>(t)]);
                    for (int v : va) vy.push_back(y[static_cast<size_t>(v)]);
                    fold_train_y.push_back(std::move(ty));
                    fold_val_y.push_back(std::move(vy));
                }
                for (size_t cs = 0; cs < c_grid.size(); ++cs) {
                    TrainOptions opts = base;
                    opts.C = c_grid[cs];
                    GridPoint point{spec, opts.C, 0.0, {}};
                    for (size_t f = 0; f < folds.size(); ++f) {
                        SvmModel m = train_on_gram(fold_train_gram[f], fold_train_y[f], opts);
                        const RVector dec = decision_values(m, fold_val_gram[f]);
                        int correct = 0;
                        for (Eigen::Index t = 0; t < dec.size(); ++t) {
                            const int pred = dec[t] < 0.0 ? -1 : 1;
                            if (pred == fold_val_y[f][static_cast<size_t>(t)]) ++correct;
                        }
                        point.fold_accuracies.push_back(
                            static_cast<double>(correct) /
                            static_cast<double>(fold_val_y[f].size()));
                    }
                    point.mean_accuracy =
                        std::accumulate(point.fold_accuracies.begin(),
                                        point.fold_accuracies.end(), 0.0) /
                        static_cast<double>(point.fold_accuracies.size());
                    report.evaluated[ks * c_grid.size() + cs] = std::move(point);
                }
            }
        } catch (const std::exception& e) {
            errors[static_cast<size_t>(w)] = e.what();
        }
    };
    if (nthreads == 1) {
        work(0);
    } else {
        for (int w = 0; w < nthreads; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
        for (const auto& e : errors)
            if (!e.empty()) throw std::runtime_error(e);
    }

    report.best_index = 0;
    for (size_t i = 1; i < report.evaluated.size(); ++i)
        if (better_point(report.evaluated[i],
                         report.evaluated[static_cast<size_t>(report.best_index)]))
            report.best_index = static_cast<int>(i);
    return report;
}

int binary_label(StateClass c) { return c == StateClass::Sep ? 1 : -1; }

EvalReport evaluate(const std::vector<int>& predicted, const std::vector<StateClass>& classes) {
    if (predicted.size() != classes.size())
        throw DimensionError("evaluate: prediction/class count mismatch");
    EvalReport r;
    int correct = 0, sep_ok = 0, ppt_ok = 0, nppt_ok = 0;
    for (size_t i = 0; i < predicted.size(); ++i) {
        const bool ok = predicted[i] == binary_label(classes[i]);
        correct += ok;
        switch (classes[i]) {
            case StateClass::Sep: r.n_sep++; sep_ok += ok; break;
            case StateClass::PptEnt: r.n_ppt++; ppt_ok += ok; break;
            case StateClass::NpptEnt: r.n_nppt++; nppt_ok += ok; break;
        }
    }
    r.overall = predicted.empty() ? 0.0 : static_cast<double>(correct) / predicted.size();
    r.sep = r.n_sep ? static_cast<double>(sep_ok) / r.n_sep : 0.0;
    r.ppt = r.n_ppt ? static_cast<double>(ppt_ok) / r.n_ppt : 0.0;
    r.nppt = r.n_nppt ? static_cast<double>(nppt_ok) / r.n_nppt : 0.0;
    return r;
}

}  // namespace entanglekit
