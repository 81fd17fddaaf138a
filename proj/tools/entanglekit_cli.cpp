// Command-line harness: dataset generation, SVM training/evaluation, purity
// audits, kernel cross-checks, and composite experiment recipes.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "entanglekit/dataset_io.hpp"
#include "entanglekit/features.hpp"
#include "entanglekit/qsim.hpp"
#include "entanglekit/svm.hpp"

namespace fs = std::filesystem;
using namespace entanglekit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitGeneration = 3;
constexpr int kExitConvergence = 4;

struct CliConfig {
    int dims = 3;  // system size d of a d x d bipartite system
    int train_size = 2000;
    int test_size = 600;
    double band_lo = -1.0;  // negative means: use the per-dims default
    double band_hi = -1.0;
    std::uint64_t seed = 1;
    int fw_iterations = 1000;
    double fw_threshold = 0.01;
    int max_tries = 200000;
    int jobs = 1;
    bool strict = false;
    std::string pca = "table";  // table | none | <component count>
    std::string kernel = "amplitude";  // amplitude | grid
    int repeats = 10;
    double svm_c = 1.0;
    double svm_tol = 1e-3;
    bool normalize_features = false;  // pre-normalize inputs of classical kernels
    bool pca_per_fold = false;        // refit PCA inside each CV fold (grid mode)
    std::vector<int> train_sizes;     // figure recipes; default 100..1000 step 100
};

void apply_config_line(CliConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "dims") cfg.dims = std::stoi(value);
    else if (key == "train_size") cfg.train_size = std::stoi(value);
    else if (key == "test_size") cfg.test_size = std::stoi(value);
    else if (key == "band_lo") cfg.band_lo = std::stod(value);
    else if (key == "band_hi") cfg.band_hi = std::stod(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "fw_iterations") cfg.fw_iterations = std::stoi(value);
    else if (key == "fw_threshold") cfg.fw_threshold = std::stod(value);
    else if (key == "max_tries") cfg.max_tries = std::stoi(value);
    else if (key == "jobs") cfg.jobs = std::stoi(value);
    else if (key == "pca") cfg.pca = value;
    else if (key == "kernel") cfg.kernel = value;
    else if (key == "repeats") cfg.repeats = std::stoi(value);
    else if (key == "svm_c") cfg.svm_c = std::stod(value);
    else if (key == "svm_tol") cfg.svm_tol = std::stod(value);
    else if (key == "normalize_features") cfg.normalize_features = (value == "true" || value == "1");
    else if (key == "pca_per_fold") cfg.pca_per_fold = (value == "true" || value == "1");
    else if (key == "train_sizes") {
        cfg.train_sizes.clear();
        std::istringstream ss(value);
        std::string tok;
        while (std::getline(ss, tok, ',')) cfg.train_sizes.push_back(std::stoi(tok));
    } else {
        throw std::runtime_error("unknown config key: " + key);
    }
}

void load_config_file(CliConfig& cfg, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": expected key=value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

GenerationConfig to_generation_config(const CliConfig& cfg) {
    GenerationConfig g;
    g.dims = BipartiteDims(cfg.dims, cfg.dims);
    g.train_size = cfg.train_size;
    g.test_size = cfg.test_size;
    g.band = default_purity_band(g.dims);
    if (cfg.band_lo >= 0.0) g.band.lo = cfg.band_lo;
    if (cfg.band_hi >= 0.0) g.band.hi = cfg.band_hi;
    g.band.mean = (g.band.lo + g.band.hi) / 2.0;
    g.band.stddev = (g.band.hi - g.band.lo) / 4.0;
    g.seed = cfg.seed;
    g.fw_iterations = cfg.fw_iterations;
    g.fw_threshold = cfg.fw_threshold;
    g.max_tries = cfg.max_tries;
    g.jobs = cfg.jobs;
    return g;
}

std::string fmt10(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

RMatrix vectorize_split(const std::vector<LabeledState>& states) {
    if (states.empty()) throw std::runtime_error("empty split");
    const Eigen::Index dim =
        static_cast<Eigen::Index>(states[0].rho.dim()) * states[0].rho.dim();
    RMatrix x(states.size(), dim);
    for (size_t i = 0; i < states.size(); ++i)
        x.row(static_cast<Eigen::Index>(i)) = vectorize(states[i].rho).transpose();
    return x;
}

RMatrix normalize_rows(const RMatrix& x) {
    RMatrix out = x;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double n = out.row(i).norm();
        if (n > 0.0) out.row(i) /= n;
    }
    return out;
}

/// PCA component count for a strategy string; 0 means no PCA.
int resolve_pca_components(const std::string& strategy, int system_d) {
    if (strategy == "none") return 0;
    if (strategy == "table") return qubits_for(system_d, true).n_components;
    const int n = std::stoi(strategy);
    if (n < 1) throw std::runtime_error("pca component count must be positive");
    return n;
}

struct FeaturePipeline {
    std::optional<PcaModel> pca;
    RMatrix train_features;
};

FeaturePipeline build_features(const RMatrix& train_vectors, int n_components) {
    FeaturePipeline p;
    if (n_components > 0) {
        p.pca = fit_pca(train_vectors, n_components);
        p.train_features = pca_transform(*p.pca, train_vectors);
    } else {
        p.train_features = train_vectors;
    }
    return p;
}

RMatrix apply_features(const FeaturePipeline& p, const RMatrix& vectors) {
    return p.pca ? pca_transform(*p.pca, vectors) : vectors;
}

void write_pca_block(std::ostream& os, const PcaModel& m) {
    os << "pca " << m.n_components << " " << m.input_dim << "\n";
    os << "mean";
    for (Eigen::Index i = 0; i < m.mean.size(); ++i) os << " " << format_double(m.mean[i]);
    os << "\n";
    for (int k = 0; k < m.n_components; ++k) {
        os << "component " << k;
        for (Eigen::Index i = 0; i < m.components.cols(); ++i)
            os << " " << format_double(m.components(k, i));
        os << " variance " << format_double(m.explained_variance[k]) << "\n";
    }
}

std::optional<PcaModel> read_pca_block(std::istream& is, const std::string& first_line) {
    std::istringstream hs(first_line);
    std::string tag;
    hs >> tag;
    if (tag != "pca") return std::nullopt;
    PcaModel m;
    hs >> m.n_components >> m.input_dim;
    std::string line;
    std::getline(is, line);
    std::istringstream ms(line);
    ms >> tag;  // "mean"
    m.mean.resize(m.input_dim);
    for (int i = 0; i < m.input_dim; ++i) ms >> m.mean[i];
    m.components.resize(m.n_components, m.input_dim);
    m.explained_variance.resize(m.n_components);
    for (int k = 0; k < m.n_components; ++k) {
        std::getline(is, line);
        std::istringstream cs(line);
        int idx;
        cs >> tag >> idx;
        for (int i = 0; i < m.input_dim; ++i) cs >> m.components(k, i);
        cs >> tag >> m.explained_variance[k];  // "variance" value
    }
    return m;
}

void save_model_manifest(const std::string& path, const SvmModel& model,
                         const std::optional<PcaModel>& pca, std::uint64_t dataset_hash,
                         int train_size, bool normalized) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write model manifest: " + path);
    os << "entanglekit-model v1\n";
    os << "kernel " << kernel_kind_name(model.kernel.kind) << " gamma "
       << format_double(model.kernel.gamma) << " degree " << model.kernel.degree << "\n";
    os << "C " << format_double(model.C) << "\n";
    os << "bias " << format_double(model.bias) << "\n";
    os << "converged " << (model.converged ? 1 : 0) << "\n";
    os << "normalized " << (normalized ? 1 : 0) << "\n";
    os << "train_size " << train_size << "\n";
    os << "dataset_hash " << std::hex << dataset_hash << std::dec << "\n";
    if (pca) write_pca_block(os, *pca);
    os << "support " << model.support_indices.size() << "\n";
    for (size_t s = 0; s < model.support_indices.size(); ++s)
        os << model.support_indices[s] << " " << model.sv_labels[s] << " "
           << format_double(model.alphas[static_cast<Eigen::Index>(s)]) << "\n";
}

struct LoadedModel {
    SvmModel model;  // without support vectors; indices refer to the train file
    std::optional<PcaModel> pca;
    std::uint64_t dataset_hash = 0;
    int train_size = 0;
    bool normalized = false;
};

LoadedModel load_model_manifest(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read model manifest: " + path);
    LoadedModel out;
    std::string line, tag;
    std::getline(is, line);
    if (line != "entanglekit-model v1") throw std::runtime_error("bad model manifest: " + path);
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        ls >> tag;
        if (tag == "kernel") {
            std::string kind, g, d;
            double gamma;
            int degree;
            ls >> kind >> g >> gamma >> d >> degree;
            out.model.kernel = {kernel_kind_from_name(kind), gamma, degree};
        } else if (tag == "C") {
            ls >> out.model.C;
        } else if (tag == "bias") {
            ls >> out.model.bias;
        } else if (tag == "converged") {
            int c;
            ls >> c;
            out.model.converged = c != 0;
        } else if (tag == "normalized") {
            int n;
            ls >> n;
            out.normalized = n != 0;
        } else if (tag == "train_size") {
            ls >> out.train_size;
        } else if (tag == "dataset_hash") {
            ls >> std::hex >> out.dataset_hash >> std::dec;
        } else if (tag == "pca") {
            out.pca = read_pca_block(is, line);
        } else if (tag == "support") {
            size_t count;
            ls >> count;
            out.model.alphas.resize(static_cast<Eigen::Index>(count));
            for (size_t s = 0; s < count; ++s) {
                std::getline(is, line);
                std::istringstream ss(line);
                int idx, label;
                double alpha;
                ss >> idx >> label >> alpha;
                out.model.support_indices.push_back(idx);
                out.model.sv_labels.push_back(label);
                out.model.alphas[static_cast<Eigen::Index>(s)] = alpha;
            }
        }
    }
    return out;
}

std::vector<int> binary_labels(const std::vector<LabeledState>& states) {
    std::vector<int> y;
    y.reserve(states.size());
    for (const auto& s : states) y.push_back(binary_label(s.label));
    return y;
}

// ---------------------------------------------------------------------------

int cmd_generate(const CliConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const GenerationConfig gen = to_generation_config(cfg);
    try {
        Dataset ds = build_dataset(gen);
        save_dataset(out_dir, ds);
        std::cout << "wrote " << out_dir << "/train.txt (" << ds.train.size() << " states), "
                  << out_dir << "/test.txt (" << ds.test.size() << " states)\n"
                  << ds.log.to_string();
        return kExitOk;
    } catch (const CalibrationError& e) {
        std::cerr << "generation failed: " << e.what() << "\n";
        return kExitGeneration;
    } catch (const GenerationExhausted& e) {
        std::cerr << "generation failed: " << e.what() << "\n";
        return kExitGeneration;
    }
}

struct TrainedPipeline {
    SvmModel model;
    std::optional<PcaModel> pca;
    bool normalized = false;
};

TrainedPipeline train_amplitude(const CliConfig& cfg, const std::vector<LabeledState>& states) {
    const RMatrix vectors = vectorize_split(states);
    const int ncomp = resolve_pca_components(cfg.pca, cfg.dims);
    FeaturePipeline features = build_features(vectors, ncomp);
    TrainOptions opts{cfg.svm_c, cfg.svm_tol, 10000};
    KernelSpec spec{KernelKind::Amplitude, 1.0, 2};
    TrainedPipeline out;
    out.model = train(features.train_features, binary_labels(states), spec, opts, cfg.jobs);
    out.pca = features.pca;
    return out;
}

int cmd_train(const CliConfig& cfg, const std::string& data_dir, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const LoadedSplit train_split = load_split_file(data_dir + "/train.txt");
    const std::uint64_t hash = file_content_hash(data_dir + "/train.txt");

    if (cfg.kernel == "amplitude") {
        TrainedPipeline tp = train_amplitude(cfg, train_split.states);
        save_model_manifest(out_dir + "/model.txt", tp.model, tp.pca, hash,
                            static_cast<int>(train_split.states.size()), false);
        std::cout << "trained amplitude-kernel model: " << tp.model.support_indices.size()
                  << " support vectors, bias " << fmt10(tp.model.bias)
                  << (tp.model.converged ? "" : " [convergence warning]") << "\n";
        if (!tp.model.converged && cfg.strict) return kExitConvergence;
        return kExitOk;
    }
    if (cfg.kernel != "grid") {
        std::cerr << "kernel must be 'amplitude' or 'grid'\n";
        return kExitConfig;
    }

    const RMatrix vectors = vectorize_split(train_split.states);
    const int ncomp = resolve_pca_components(cfg.pca, cfg.dims);
    const std::vector<int> y = binary_labels(train_split.states);
    const auto kernels = default_kernel_grid();
    const auto c_grid = default_value_grid();
    TrainOptions opts{1.0, cfg.svm_tol, 10000};

    std::ofstream report(out_dir + "/grid_report.txt", std::ios::binary);
    report << "repeat\tkernel\tC\tmean_cv_accuracy\n";
    std::vector<GridPoint> winners;
    for (int rep = 0; rep < cfg.repeats; ++rep) {
        const std::uint64_t cv_seed = substream_seed(cfg.seed, {0x47524944ULL, static_cast<std::uint64_t>(rep)});
        RMatrix features;
        if (cfg.pca_per_fold || ncomp == 0) {
            features = vectors;  // per-fold PCA happens inside grid_search below
        } else {
            FeaturePipeline p = build_features(vectors, ncomp);
            features = p.train_features;
        }
        if (cfg.normalize_features) features = normalize_rows(features);
        GridSearchReport rep_out;
        if (cfg.pca_per_fold && ncomp > 0) {
            // Refit PCA on each fold's training part: run the grid per fold
            // by hand. Gram caching still applies within each fold.
            const auto folds = stratified_kfold(y, 5, cv_seed);
            std::vector<GridPoint> points;
            for (size_t ks = 0; ks < kernels.size(); ++ks)
                for (size_t cs = 0; cs < c_grid.size(); ++cs)
                    points.push_back({kernels[ks], c_grid[cs], 0.0, {}});
            for (const auto& [tr, va] : folds) {
                RMatrix tr_vec(tr.size(), vectors.cols());
                for (size_t i = 0; i < tr.size(); ++i)
                    tr_vec.row(static_cast<Eigen::Index>(i)) = vectors.row(tr[i]);
                RMatrix va_vec(va.size(), vectors.cols());
                for (size_t i = 0; i < va.size(); ++i)
                    va_vec.row(static_cast<Eigen::Index>(i)) = vectors.row(va[i]);
                PcaModel fold_pca = fit_pca(tr_vec, ncomp);
                RMatrix tr_f = pca_transform(fold_pca, tr_vec);
                RMatrix va_f = pca_transform(fold_pca, va_vec);
                if (cfg.normalize_features) {
                    tr_f = normalize_rows(tr_f);
                    va_f = normalize_rows(va_f);
                }
                std::vector<int> ty, vy;
                for (int t : tr) ty.push_back(y[static_cast<size_t>(t)]);
                for (int v : va) vy.push_back(y[static_cast<size_t>(v)]);
                for (size_t p = 0; p < points.size(); ++p) {
                    const RMatrix g_tr = gram_matrix(points[p].spec, tr_f, cfg.jobs);
                    const RMatrix g_va = gram_matrix(points[p].spec, tr_f, va_f, cfg.jobs);
                    TrainOptions o = opts;
                    o.C = points[p].C;
                    SvmModel m = train_on_gram(g_tr, ty, o);
                    const RVector dec = decision_values(m, g_va);
                    int ok = 0;
                    for (Eigen::Index t = 0; t < dec.size(); ++t)
                        ok += ((dec[t] < 0 ? -1 : 1) == vy[static_cast<size_t>(t)]);
                    points[p].fold_accuracies.push_back(static_cast<double>(ok) / vy.size());
                }
            }
            for (auto& p : points) {
                p.mean_accuracy = 0;
                for (double a : p.fold_accuracies) p.mean_accuracy += a;
                p.mean_accuracy /= static_cast<double>(p.fold_accuracies.size());
            }
            rep_out.evaluated = std::move(points);
            rep_out.best_index = 0;
            for (size_t i = 1; i < rep_out.evaluated.size(); ++i) {
                const auto& a = rep_out.evaluated[i];
                const auto& b = rep_out.evaluated[static_cast<size_t>(rep_out.best_index)];
                if (a.mean_accuracy > b.mean_accuracy ||
                    (a.mean_accuracy == b.mean_accuracy && a.C < b.C))
                    rep_out.best_index = static_cast<int>(i);
            }
        } else {
            rep_out = grid_search(features, y, kernels, c_grid, 5, cv_seed, cfg.jobs, opts);
        }
        const GridPoint& best = rep_out.best();
        winners.push_back(best);
        report << rep << "\t" << best.spec.to_string() << "\tC=" << fmt10(best.C) << "\t"
               << fmt10(best.mean_accuracy) << "\n";
    }
    double mean = 0, sq = 0;
    for (const auto& w : winners) mean += w.mean_accuracy;
    mean /= static_cast<double>(winners.size());
    for (const auto& w : winners) sq += (w.mean_accuracy - mean) * (w.mean_accuracy - mean);
    const double stddev = std::sqrt(sq / static_cast<double>(winners.size()));
    report << "best_cv_accuracy mean " << fmt10(mean) << " stddev " << fmt10(stddev) << "\n";

    // Final model: the winner with the best CV score across repeats.
    size_t pick = 0;
    for (size_t i = 1; i < winners.size(); ++i)
        if (winners[i].mean_accuracy > winners[pick].mean_accuracy) pick = i;
    RMatrix features = vectors;
    std::optional<PcaModel> pca;
    if (ncomp > 0) {
        FeaturePipeline p = build_features(vectors, ncomp);
        features = p.train_features;
        pca = p.pca;
    }
    if (cfg.normalize_features) features = normalize_rows(features);
    TrainOptions final_opts = opts;
    final_opts.C = winners[pick].C;
    SvmModel model = train(features, y, winners[pick].spec, final_opts, cfg.jobs);
    save_model_manifest(out_dir + "/model.txt", model, pca, hash,
                        static_cast<int>(train_split.states.size()), cfg.normalize_features);
    std::cout << "grid sweep done: best " << winners[pick].spec.to_string() << " C="
              << fmt10(winners[pick].C) << " mean_cv=" << fmt10(mean) << " stddev="
              << fmt10(stddev) << "\n";
    if (!model.converged && cfg.strict) return kExitConvergence;
    return kExitOk;
}

EvalReport evaluate_model(const LoadedModel& lm, const std::vector<LabeledState>& train,
                          const std::vector<LabeledState>& test, int jobs) {
    const RMatrix train_vectors = vectorize_split(train);
    const RMatrix test_vectors = vectorize_split(test);
    RMatrix train_features =
        lm.pca ? pca_transform(*lm.pca, train_vectors) : train_vectors;
    RMatrix test_features = lm.pca ? pca_transform(*lm.pca, test_vectors) : test_vectors;
    if (lm.normalized) {
        train_features = normalize_rows(train_features);
        test_features = normalize_rows(test_features);
    }
    const RMatrix gram = gram_matrix(lm.model.kernel, train_features, test_features, jobs);
    const RVector dec = decision_values(lm.model, gram);
    std::vector<int> pred;
    std::vector<StateClass> cls;
    for (Eigen::Index i = 0; i < dec.size(); ++i) {
        pred.push_back(dec[i] < 0.0 ? -1 : 1);
        cls.push_back(test[static_cast<size_t>(i)].label);
    }
    return evaluate(pred, cls);
}

int cmd_evaluate(const CliConfig& cfg, const std::string& data_dir, const std::string& model_path,
                 const std::string& out_csv) {
    const LoadedModel lm = load_model_manifest(model_path);
    const LoadedSplit train_split = load_split_file(data_dir + "/train.txt");
    const LoadedSplit test_split = load_split_file(data_dir + "/test.txt");
    const std::uint64_t hash = file_content_hash(data_dir + "/train.txt");
    if (hash != lm.dataset_hash)
        std::cerr << "warning: model was trained on a different dataset file\n";
    const EvalReport r = evaluate_model(lm, train_split.states, test_split.states, cfg.jobs);
    std::ofstream os(out_csv, std::ios::binary);
    os << "train_size,kernel,overall,sep_acc,ppt_acc,nppt_acc\n";
    os << lm.train_size << "," << lm.model.kernel.to_string() << "," << fmt10(r.overall) << ","
       << fmt10(r.sep) << "," << fmt10(r.ppt) << "," << fmt10(r.nppt) << "\n";
    std::cout << "overall " << fmt10(r.overall) << " sep " << fmt10(r.sep) << " ppt "
              << fmt10(r.ppt) << " nppt " << fmt10(r.nppt) << "\n";
    return kExitOk;
}

struct PurityStats {
    double mean = 0, stddev = 0;
    int count = 0;
};

std::map<StateClass, PurityStats> purity_by_class(const std::vector<LabeledState>& states) {
    std::map<StateClass, PurityStats> out;
    std::map<StateClass, std::vector<double>> vals;
    for (const auto& s : states) vals[s.label].push_back(s.purity);
    for (auto& [cls, v] : vals) {
        PurityStats st;
        st.count = static_cast<int>(v.size());
        for (double x : v) st.mean += x;
        st.mean /= v.size();
        for (double x : v) st.stddev += (x - st.mean) * (x - st.mean);
        st.stddev = std::sqrt(st.stddev / v.size());
        out[cls] = st;
    }
    return out;
}

int cmd_purity_audit(const CliConfig&, const std::string& data_dir, const std::string& out_csv) {
    std::vector<LabeledState> all;
    for (const char* split : {"/train.txt", "/test.txt"}) {
        const std::string path = data_dir + split;
        if (fs::exists(path)) {
            auto loaded = load_split_file(path);
            all.insert(all.end(), loaded.states.begin(), loaded.states.end());
        }
    }
    if (all.empty()) {
        std::cerr << "no dataset files under " << data_dir << "\n";
        return kExitConfig;
    }
    const auto stats = purity_by_class(all);
    std::ofstream os(out_csv, std::ios::binary);
    os << "class,count,purity_mean,purity_stddev\n";
    for (const auto& [cls, st] : stats)
        os << state_class_tag(cls) << "," << st.count << "," << fmt10(st.mean) << ","
           << fmt10(st.stddev) << "\n";
    bool flagged = false;
    std::vector<std::pair<StateClass, PurityStats>> list(stats.begin(), stats.end());
    for (size_t a = 0; a < list.size(); ++a)
        for (size_t b = a + 1; b < list.size(); ++b) {
            const double pooled = std::sqrt((list[a].second.stddev * list[a].second.stddev +
                                             list[b].second.stddev * list[b].second.stddev) /
                                            2.0);
            const double diff = std::abs(list[a].second.mean - list[b].second.mean);
            if (diff > pooled) {
                flagged = true;
                os << "# FLAG " << state_class_tag(list[a].first) << " vs "
                   << state_class_tag(list[b].first) << ": |mean diff| " << fmt10(diff)
                   << " exceeds pooled stddev " << fmt10(pooled) << "\n";
                std::cout << "FLAG: purity bias between " << state_class_tag(list[a].first)
                          << " and " << state_class_tag(list[b].first) << "\n";
            }
        }
    if (!flagged) std::cout << "purity audit clean (" << list.size() << " classes)\n";
    return kExitOk;
}

int cmd_kernel_check(const CliConfig& cfg, const std::string& data_dir, int n_pairs,
                     double epsilon, double delta, const std::string& out_path,
                     const std::string& gram_csv) {
    std::ofstream os(out_path, std::ios::binary);
    os << "pairs " << n_pairs << "\n";
    if (n_pairs == 0) {
        os << "empty report\n";
        return kExitOk;
    }
    std::vector<RVector> vectors;
    if (!data_dir.empty()) {
        const LoadedSplit test_split = load_split_file(data_dir + "/test.txt");
        const RMatrix raw = vectorize_split(test_split.states);
        const int ncomp = resolve_pca_components(cfg.pca, cfg.dims);
        // A PCA basis fitted on the test vectors themselves is fine here:
        // this is a numerical identity check, not a learning experiment.
        RMatrix feats = raw;
        if (ncomp > 0 && raw.rows() >= ncomp) {
            FeaturePipeline p = build_features(raw, ncomp);
            feats = p.train_features;
        }
        for (Eigen::Index i = 0; i < feats.rows(); ++i) vectors.push_back(feats.row(i));
    } else {
        RandomStream rng(substream_seed(cfg.seed, {0x4b43ULL}));
        const int dim = 64;
        for (int i = 0; i < 2 * n_pairs; ++i) {
            RVector v(dim);
            for (int j = 0; j < dim; ++j) v[j] = rng.gaussian();
            vectors.push_back(v);
        }
    }
    if (vectors.size() < 2) {
        std::cerr << "need at least two vectors\n";
        return kExitConfig;
    }

    const KernelSpec amp{KernelKind::Amplitude, 1.0, 2};
    if (!gram_csv.empty()) {
        // cross-implementation diffing: the full classical Gram as CSV
        RMatrix rows(vectors.size(), vectors[0].size());
        for (size_t i = 0; i < vectors.size(); ++i)
            rows.row(static_cast<Eigen::Index>(i)) = vectors[i].transpose();
        const RMatrix g = gram_matrix(amp, rows, cfg.jobs);
        std::ofstream gs(gram_csv, std::ios::binary);
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            for (Eigen::Index j = 0; j < g.cols(); ++j)
                gs << (j ? "," : "") << format_double(g(i, j));
            gs << "\n";
        }
    }
    const ShotPlan plan = shots_required(epsilon, delta);
    RandomStream shot_rng(substream_seed(cfg.seed, {0x53484f54ULL}));
    double max_swap_dev = 0, max_had_dev = 0, max_shot_dev = 0;
    int shot_violations = 0;
    for (int p = 0; p < n_pairs; ++p) {
        const RVector& x = vectors[(2 * p) % vectors.size()];
        const RVector& y = vectors[(2 * p + 1) % vectors.size()];
        const double exact = kernel_eval(amp, x, y);
        int n = 1;
        while ((Eigen::Index(1) << n) < std::max(x.size(), y.size())) ++n;
        const StateVector sx = encode(x, n), sy = encode(y, n);
        const double via_swap = 2.0 * swap_test_p0(sx, sy) - 1.0;
        const double re = 2.0 * hadamard_test_p0(sx, sy, OverlapPart::Re) - 1.0;
        const double im = 2.0 * hadamard_test_p0(sx, sy, OverlapPart::Im) - 1.0;
        const double via_had = re * re + im * im;
        const double sampled = sampled_kernel(x, y, plan.shots, shot_rng);
        max_swap_dev = std::max(max_swap_dev, std::abs(via_swap - exact));
        max_had_dev = std::max(max_had_dev, std::abs(via_had - exact));
        max_shot_dev = std::max(max_shot_dev, std::abs(sampled - exact));
        // The shot plan bounds the measured probability to +-epsilon, which
        // doubles on the kernel scale.
        if (std::abs(sampled - exact) > 2.0 * epsilon) ++shot_violations;
    }
    os << "shots " << plan.shots << " (epsilon " << fmt10(epsilon) << ", delta " << fmt10(delta)
       << ")\n";
    os << "max_swap_deviation " << format_double(max_swap_dev) << "\n";
    os << "max_hadamard_deviation " << format_double(max_had_dev) << "\n";
    os << "max_sampled_deviation " << format_double(max_shot_dev) << "\n";
    os << "sampled_violations " << shot_violations << " / " << n_pairs << "\n";
    std::cout << "kernel check: exact-circuit deviation " << format_double(max_swap_dev)
              << ", shot violations " << shot_violations << "/" << n_pairs << "\n";
    return kExitOk;
}

int run_pipeline_row(const CliConfig& base, int dims, int train_size, const std::string& pca,
                     const std::string& work_dir, std::ostream& csv, bool per_class) {
    CliConfig cfg = base;
    cfg.dims = dims;
    cfg.train_size = train_size;
    cfg.pca = pca;
    // Datasets are shared across PCA variants; models are per variant.
    const std::string data_dir =
        work_dir + "/d" + std::to_string(dims) + "_n" + std::to_string(train_size);
    const std::string model_dir = data_dir + "_" + pca;
    if (!fs::exists(data_dir + "/train.txt")) {
        fs::create_directories(data_dir);
        if (int rc = cmd_generate(cfg, data_dir); rc != kExitOk) return rc;
    }
    fs::create_directories(model_dir);
    if (int rc = cmd_train(cfg, data_dir, model_dir); rc != kExitOk && rc != kExitConvergence)
        return rc;
    const LoadedModel lm = load_model_manifest(model_dir + "/model.txt");
    const LoadedSplit train_split = load_split_file(data_dir + "/train.txt");
    const LoadedSplit test_split = load_split_file(data_dir + "/test.txt");
    const EvalReport r = evaluate_model(lm, train_split.states, test_split.states, cfg.jobs);
    csv << dims << "," << train_size << "," << pca << "," << fmt10(r.overall);
    if (per_class) csv << "," << fmt10(r.sep) << "," << fmt10(r.ppt) << "," << fmt10(r.nppt);
    csv << "\n";
    csv.flush();
    std::cout << "  dims " << dims << " train " << train_size << " pca " << pca << " -> "
              << fmt10(r.overall) << "\n";
    return kExitOk;
}

std::vector<int> figure_train_sizes(const CliConfig& cfg) {
    if (!cfg.train_sizes.empty()) return cfg.train_sizes;
    std::vector<int> sizes;
    for (int n = 100; n <= 1000; n += 100) sizes.push_back(n);
    sizes.push_back(2000);
    return sizes;
}

int cmd_reproduce_figure(const CliConfig& cfg, int figure, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const std::vector<int> sizes = figure_train_sizes(cfg);
    switch (figure) {
        case 2: {
            std::ofstream csv(out_dir + "/figure2.csv", std::ios::binary);
            csv << "dims,train_size,pca,accuracy\n";
            for (int n : sizes)
                for (const char* pca : {"32", "64", "none"})
                    if (int rc = run_pipeline_row(cfg, 3, n, pca, out_dir, csv, false);
                        rc != kExitOk)
                        return rc;
            std::cout << "wrote " << out_dir << "/figure2.csv\n";
            return kExitOk;
        }
        case 4:
        case 5: {
            const bool per_class = figure == 5;
            std::ofstream csv(out_dir + "/figure" + std::to_string(figure) + ".csv",
                              std::ios::binary);
            csv << (per_class ? "dims,train_size,pca,accuracy,sep_acc,ppt_acc,nppt_acc\n"
                              : "dims,train_size,pca,accuracy\n");
            for (int dims : {3, 4, 5}) {
                const int min_n = qubits_for(dims, true).n_components;
                for (int n : sizes) {
                    if (n < min_n) continue;  // PCA needs at least n_components samples
                    if (int rc = run_pipeline_row(cfg, dims, n, "table", out_dir, csv, per_class);
                        rc != kExitOk)
                        return rc;
                }
            }
            std::cout << "wrote " << out_dir << "/figure" << figure << ".csv\n";
            return kExitOk;
        }
        case 6: {
            // Debiased default dataset vs a deliberately biased fixture.
            CliConfig debiased = cfg;
            const std::string d1 = out_dir + "/debiased";
            fs::create_directories(d1);
            if (int rc = cmd_generate(debiased, d1); rc != kExitOk) return rc;
            if (int rc = cmd_purity_audit(debiased, d1, out_dir + "/figure6_debiased.csv");
                rc != kExitOk)
                return rc;
            // The biased fixture mimics uncontrolled generation: pure-ish
            // separable products (k=1) against deep k=50 mixtures labeled as
            // entangled. Deep 3x3 mixtures are actually inside the
            // separability ball; the audit exists to flag such data.
            const std::string d2 = out_dir + "/biased";
            fs::create_directories(d2);
            BipartiteDims dims(cfg.dims, cfg.dims);
            std::vector<LabeledState> biased;
            const int n_per = std::max(10, cfg.test_size / 3);
            for (int i = 0; i < n_per; ++i) {
                RandomStream rng(substream_seed(cfg.seed, {0xB1A5ULL, 0, static_cast<std::uint64_t>(i)}));
                CMatrix rho = random_separable(dims, 1, rng);
                biased.push_back({DensityMatrix(rho), StateClass::Sep, purity(rho), 1,
                                  std::nullopt, cfg.seed});
            }
            for (int i = 0; i < n_per; ++i) {
                RandomStream rng(substream_seed(cfg.seed, {0xB1A5ULL, 1, static_cast<std::uint64_t>(i)}));
                CMatrix rho = random_mixture(dims.total(), 50, rng);
                biased.push_back({DensityMatrix(rho), StateClass::NpptEnt, purity(rho), 50,
                                  std::nullopt, cfg.seed});
            }
            SplitHeader h{dims, 0, 0.0, 1.0, cfg.seed};
            save_split_file(d2 + "/test.txt", biased, h);
            if (int rc = cmd_purity_audit(cfg, d2, out_dir + "/figure6_biased.csv");
                rc != kExitOk)
                return rc;
            std::cout << "wrote " << out_dir << "/figure6_{debiased,biased}.csv\n";
            return kExitOk;
        }
        default:
            std::cerr << "reproduce-figure supports figures 2, 4, 5, 6\n";
            return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entanglekit: bipartite entanglement classification toolkit"};
    app.require_subcommand(1);

    CliConfig cfg;
    std::string config_path;
    bool seed_from_cli = false;
    std::uint64_t cli_seed = 0;
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--seed", cli_seed, "master seed (overrides config and env)")
        ->each([&](const std::string&) { seed_from_cli = true; });
    app.add_option("--jobs", cfg.jobs, "worker threads");
    app.add_flag("--strict", cfg.strict, "escalate convergence warnings to exit code 4");

    std::string out_dir = "out", data_dir, model_path = "", out_csv;
    int figure = 0, n_pairs = 100;
    double epsilon = 0.05, delta = 0.05;

    auto* gen = app.add_subcommand("generate", "generate a labeled dataset");
    gen->add_option("--out", out_dir, "output directory");
    gen->add_option("--dims", cfg.dims, "system size d (d x d bipartite)");
    gen->add_option("--train-size", cfg.train_size);
    gen->add_option("--test-size", cfg.test_size);
    gen->add_option("--band-lo", cfg.band_lo);
    gen->add_option("--band-hi", cfg.band_hi);

    auto* tr = app.add_subcommand("train", "train an SVM on a generated dataset");
    tr->add_option("--data", data_dir, "dataset directory")->required();
    tr->add_option("--out", out_dir, "output directory");
    tr->add_option("--dims", cfg.dims);
    tr->add_option("--kernel", cfg.kernel, "amplitude | grid");
    tr->add_option("--pca", cfg.pca, "table | none | <components>");
    tr->add_option("--repeats", cfg.repeats);
    tr->add_option("--svm-c", cfg.svm_c);

    auto* ev = app.add_subcommand("evaluate", "per-class accuracy of a trained model");
    ev->add_option("--data", data_dir)->required();
    ev->add_option("--model", model_path)->required();
    ev->add_option("--out", out_csv, "output CSV")->required();

    auto* pa = app.add_subcommand("purity-audit", "per-class purity statistics");
    pa->add_option("--data", data_dir)->required();
    pa->add_option("--out", out_csv)->required();

    auto* kc = app.add_subcommand("kernel-check", "classical vs simulated kernel comparison");
    kc->add_option("--data", data_dir, "dataset directory (omit for random vectors)");
    kc->add_option("--pairs", n_pairs);
    kc->add_option("--epsilon", epsilon);
    kc->add_option("--delta", delta);
    kc->add_option("--out", out_csv)->required();
    kc->add_option("--dims", cfg.dims);
    kc->add_option("--pca", cfg.pca);
    std::string gram_csv;
    kc->add_option("--gram-csv", gram_csv, "also export the amplitude Gram matrix as CSV");

    auto* rf = app.add_subcommand("reproduce-figure", "composite experiment recipes");
    rf->add_option("figure", figure, "2, 4, 5 or 6")->required();
    rf->add_option("--out", out_dir);
    rf->add_option("--dims", cfg.dims);
    rf->add_option("--train-sizes", cfg.train_sizes)->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) load_config_file(cfg, config_path);
        if (const char* env = std::getenv("ENTANGLEKIT_SEED")) cfg.seed = std::stoull(env);
        if (seed_from_cli) cfg.seed = cli_seed;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (gen->parsed()) return cmd_generate(cfg, out_dir);
        if (tr->parsed()) return cmd_train(cfg, data_dir, out_dir);
        if (ev->parsed()) return cmd_evaluate(cfg, data_dir, model_path, out_csv);
        if (pa->parsed()) return cmd_purity_audit(cfg, data_dir, out_csv);
        if (kc->parsed()) return cmd_kernel_check(cfg, data_dir, n_pairs, epsilon, delta, out_csv, gram_csv);
        if (rf->parsed()) return cmd_reproduce_figure(cfg, figure, out_dir);
    } catch (const CalibrationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitGeneration;
    } catch (const GenerationExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitGeneration;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
