#include "entanglekit/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace entanglekit {

namespace {

constexpr std::uint64_t kSepTag = 0x534550;    // "SEP"
constexpr std::uint64_t kPptTag = 0x505054;    // "PPT"
constexpr std::uint64_t kNpptTag = 0x4e505054; // "NPPT"
constexpr std::uint64_t kCalibTag = 0x43414c; // "CAL"

std::uint64_t class_tag(StateClass c) {
    switch (c) {
        case StateClass::Sep: return kSepTag;
        case StateClass::PptEnt: return kPptTag;
        case StateClass::NpptEnt: return kNpptTag;
    }
    return 0;
}

RVector dirichlet_flat(int k, RandomStream& rng) {
    RVector w(k);
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        w[i] = rng.exponential();
        sum += w[i];
    }
    return w / sum;
}

CVector random_pure(int d, RandomStream& rng) {
    CVector v(d);
    for (int i = 0; i < d; ++i) v[i] = Complex(rng.gaussian(), rng.gaussian());
    return v / v.norm();
}

CMatrix projector(const CVector& v) { return v * v.adjoint(); }

/// Top eigenvector of a Hermitian matrix. The (rho - rho_t) matrices the
/// Frank-Wolfe oracle sees routinely have a near-degenerate top pair, where
/// shifted power iteration stalls past any useful iteration budget; at the
/// dimensions handled here (<= 32) the full Jacobi solve is faster outright.
CVector top_eigenvector(const CMatrix& m) {
    return hermitian_eig(m).vectors.col(0);
}

struct MixtureGenerator {
    BipartiteDims dims;
    StateClass label;
    int k;

    CMatrix draw(RandomStream& rng) const {
        if (label == StateClass::Sep) return random_separable(dims, k, rng);
        return random_mixture(dims.total(), k, rng);
    }
};

}  // namespace

const char* state_class_tag(StateClass c) {
    switch (c) {
        case StateClass::Sep: return "SEP";
        case StateClass::PptEnt: return "PPT_ENT";
        case StateClass::NpptEnt: return "NPPT_ENT";
    }
    return "?";
}

StateClass state_class_from_tag(const std::string& tag) {
    if (tag == "SEP") return StateClass::Sep;
    if (tag == "PPT_ENT") return StateClass::PptEnt;
    if (tag == "NPPT_ENT") return StateClass::NpptEnt;
    throw ContractViolation("unknown state class tag: " + tag);
}

CMatrix random_density(int d, RandomStream& rng) {
    if (d < 1) throw DimensionError("random_density requires d >= 1");
    CMatrix a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = Complex(rng.gaussian(), rng.gaussian());
    CMatrix m = a.adjoint() * a;
    m = (m + m.adjoint()) / 2.0;  // scrub rounding asymmetry
    return m / std::real(m.trace());
}

CMatrix random_separable(const BipartiteDims& dims, int k, RandomStream& rng) {
    if (k < 1) throw ContractViolation("random_separable requires k >= 1");
    const RVector q = dirichlet_flat(k, rng);
    CMatrix rho = CMatrix::Zero(dims.total(), dims.total());
    for (int j = 0; j < k; ++j) {
        // Sequenced explicitly: argument evaluation order must not decide
        // which factor consumes the stream first.
        const CMatrix a = random_density(dims.dA, rng);
        const CMatrix b = random_density(dims.dB, rng);
        rho += q[j] * tensor_product(a, b);
    }
    return rho;
}

CMatrix random_mixture(int d, int k, RandomStream& rng) {
    if (k < 1) throw ContractViolation("random_mixture requires k >= 1");
    const RVector q = dirichlet_flat(k, rng);
    CMatrix rho = CMatrix::Zero(d, d);
    for (int j = 0; j < k; ++j) rho += q[j] * random_density(d, rng);
    return rho;
}

CMatrix random_nppt(const BipartiteDims& dims, int k, RandomStream& rng, int max_tries) {
    if (max_tries < 1) throw ContractViolation("random_nppt requires max_tries >= 1");
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        const CMatrix rho = random_mixture(dims.total(), k, rng);
        if (!is_ppt(rho, dims)) return rho;
    }
    throw GenerationExhausted("random_nppt: no NPPT sample in " + std::to_string(max_tries) +
                              " tries (k=" + std::to_string(k) + ")");
}

FwResult frank_wolfe_nearest_separable(const CMatrix& rho, const BipartiteDims& dims, int T,
                                       RandomStream& rng) {
    if (T < 1) throw ContractViolation("frank_wolfe requires T >= 1");
    if (rho.rows() != dims.total())
        throw DimensionError("frank_wolfe: matrix dimension must equal dA*dB");

    const CVector init_a = random_pure(dims.dA, rng);
    const CVector init_b = random_pure(dims.dB, rng);
    CMatrix rho_t = tensor_product(projector(init_a), projector(init_b));
    for (int t = 0; t < T; ++t) {
        const CVector s = top_eigenvector(rho - rho_t);
        const SchmidtForm schmidt = schmidt_decompose(s, dims);
        const CMatrix vertex = tensor_product(projector(schmidt.left_vectors.col(0)),
                                              projector(schmidt.right_vectors.col(0)));
        const double alpha = 2.0 / (t + 2.0);
        rho_t = (1.0 - alpha) * rho_t + alpha * vertex;
    }
    return {rho_t, (rho - rho_t).norm()};
}

LabeledState generate_ppt_entangled(const BipartiteDims& dims, int k, double threshold, int T,
                                    RandomStream& rng, int max_tries) {
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        CMatrix rho = random_mixture(dims.total(), k, rng);
        if (!is_ppt(rho, dims)) continue;
        const FwResult fw = frank_wolfe_nearest_separable(rho, dims, T, rng);
        if (fw.distance > threshold)
            return {DensityMatrix(rho), StateClass::PptEnt, purity(rho), k, fw.distance, 0};
    }
    throw GenerationExhausted("generate_ppt_entangled: exhausted " + std::to_string(max_tries) +
                              " tries (k=" + std::to_string(k) + ")");
}

int calibrate_summands(const BipartiteDims& dims, const PurityBand& band, StateClass label,
                       std::uint64_t seed) {
    const double floor = 1.0 / dims.total();
    if (!(floor <= band.lo && band.lo < band.hi && band.hi <= 1.0))
        throw CalibrationError("purity band must satisfy 1/(dA*dB) <= lo < hi <= 1");

    // Mean purity over 200 unfiltered class samples; the class condition
    // (PPT / NPPT) applies but the band filter does not, otherwise the
    // probe would be tautological.
    constexpr int kProbes = 200;
    std::map<int, double> table;
    auto mean_purity = [&](int k) {
        auto it = table.find(k);
        if (it != table.end()) return it->second;
        MixtureGenerator gen{dims, label, k};
        double sum = 0.0;
        int done = 0;
        long long tries = 0;
        const long long try_cap = 1000LL * kProbes;
        const long long abandon_after = 20000;  // zero accepts by then: class too rare at this k
        RandomStream rng(substream_seed(seed, {kCalibTag, class_tag(label),
                                               static_cast<std::uint64_t>(k)}));
        while (done < kProbes && tries < try_cap) {
            ++tries;
            if (done == 0 && tries > abandon_after) break;
            CMatrix rho = gen.draw(rng);
            if (label != StateClass::Sep) {
                const bool ppt = is_ppt(rho, dims);
                if (label == StateClass::PptEnt && !ppt) continue;
                if (label == StateClass::NpptEnt && ppt) continue;
            }
            sum += purity(rho);
            ++done;
        }
        // Too rare to probe: report as unreachable from above.
        const double mean = (done == kProbes) ? sum / kProbes
                                              : std::numeric_limits<double>::quiet_NaN();
        table[k] = mean;
        return mean;
    };
    auto usable = [](double m) { return !std::isnan(m); };
    auto fail = [&](const std::string& why) -> CalibrationError {
        std::ostringstream os;
        os << "calibrate_summands(" << state_class_tag(label) << "): " << why
           << "; band [" << band.lo << ", " << band.hi << "]; mean purity vs k:";
        for (const auto& [k, m] : table) os << "  k=" << k << " -> " << m;
        return CalibrationError(os.str());
    };

    // Mean purity decreases with k. Double until below hi, then bisect for
    // the smallest in-band k.
    constexpr int kMaxSummands = 4096;
    int k_first = 0;  // smallest probed k with a measurable mean
    for (int k = 1; k <= kMaxSummands; k *= 2) {
        if (usable(mean_purity(k))) {
            k_first = k;
            break;
        }
    }
    if (k_first == 0) throw fail("class generator produced no samples at any probed k");

    double m_first = mean_purity(k_first);
    if (m_first < band.lo) throw fail("mean purity already below the band at the smallest feasible k");
    if (m_first <= band.hi) {
        // Scan down to the smallest k that stays in band.
        int k = k_first;
        while (k > 1) {
            const double m = mean_purity(k - 1);
            if (usable(m) && band.lo <= m && m <= band.hi)
                --k;
            else
                break;
        }
        return k;
    }

    int lo_k = k_first, hi_k = 0;
    for (int k = k_first * 2; k <= kMaxSummands; k *= 2) {
        const double m = mean_purity(k);
        if (!usable(m)) { lo_k = k; continue; }
        if (m > band.hi) { lo_k = k; continue; }
        hi_k = k;
        break;
    }
    if (hi_k == 0) throw fail("mean purity never entered the band while doubling k");
    while (hi_k - lo_k > 1) {
        const int mid = lo_k + (hi_k - lo_k) / 2;
        const double m = mean_purity(mid);
        if (usable(m) && m <= band.hi)
            hi_k = mid;
        else
            lo_k = mid;
    }
    const double m = mean_purity(hi_k);
    if (m < band.lo) throw fail("mean purity jumps over the band between adjacent k");
    return hi_k;
}

PurityBand default_purity_band(const BipartiteDims& dims) {
    if (dims.dA == 3 && dims.dB == 3) return {0.160, 0.005, 0.150, 0.170};
    if (dims.dA == 4 && dims.dB == 4) return {0.086, 0.003, 0.080, 0.092};
    if (dims.dA == 5 && dims.dB == 5) return {0.054, 0.002, 0.050, 0.058};
    // Generic fallback: window around the purity of a single Ginibre draw
    // of the composite dimension (the natural scale of the entangled classes).
    const double d = dims.total();
    const double center = 2.0 * d / (d * d + 1.0);
    return {center, center * 0.05, center * 0.92, center * 1.08};
}

std::string GenerationLog::to_string() const {
    std::ostringstream os;
    auto line = [&](const char* name, const ClassGenerationStats& s) {
        os << name << ": k=" << s.k << " accepts=" << s.accepts
           << " candidates=" << s.candidates << " band_accepts=" << s.band_accepts;
        if (s.fw_runs > 0) os << " fw_runs=" << s.fw_runs;
        if (s.candidates > 0)
            os << " acceptance=" << static_cast<double>(s.accepts) / static_cast<double>(s.candidates);
        os << "\n";
    };
    line("SEP", sep);
    line("PPT_ENT", ppt_ent);
    line("NPPT_ENT", nppt_ent);
    return os.str();
}

namespace {

/// Generates sample `index` of `label` on its own substream; the rejection
/// loop (band filter + class condition + Frank-Wolfe test) runs entirely
/// inside that substream.
LabeledState generate_sample(const GenerationConfig& cfg, StateClass label, int k,
                             std::uint64_t split_tag, int index, ClassGenerationStats& stats) {
    const std::uint64_t seed = substream_seed(
        cfg.seed, {split_tag, class_tag(label), static_cast<std::uint64_t>(index)});
    RandomStream rng(seed);
    MixtureGenerator gen{cfg.dims, label, k};
    long long candidates = 0, band_accepts = 0, fw_runs = 0;
    for (int attempt = 0; attempt < cfg.max_tries; ++attempt) {
        ++candidates;
        CMatrix rho = gen.draw(rng);
        const double p = purity(rho);
        if (p < cfg.band.lo || p > cfg.band.hi) continue;
        ++band_accepts;
        std::optional<double> fw_distance;
        if (label != StateClass::Sep) {
            const bool ppt = is_ppt(rho, cfg.dims);
            if (label == StateClass::NpptEnt && ppt) continue;
            if (label == StateClass::PptEnt) {
                if (!ppt) continue;
                ++fw_runs;
                const FwResult fw =
                    frank_wolfe_nearest_separable(rho, cfg.dims, cfg.fw_iterations, rng);
                if (fw.distance <= cfg.fw_threshold) continue;
                fw_distance = fw.distance;
            }
        }
        stats.candidates += candidates;
        stats.band_accepts += band_accepts;
        stats.fw_runs += fw_runs;
        stats.accepts += 1;
        return {DensityMatrix(std::move(rho)), label, p, k, fw_distance, seed};
    }
    throw GenerationExhausted(std::string("generation exhausted for ") + state_class_tag(label) +
                              " sample " + std::to_string(index) + " after " +
                              std::to_string(cfg.max_tries) + " tries");
}

struct SampleSpec {
    StateClass label;
    std::uint64_t split_tag;
    int index;       // per-class index within the split (seeds the substream)
    int slot;        // position in the output vector
    bool train;
};

}  // namespace

Dataset build_dataset(const GenerationConfig& config) {
    if (config.train_size < 2 || config.train_size % 2 != 0)
        throw ContractViolation("train_size must be a positive even number");
    if (config.test_size < 3 || config.test_size % 3 != 0)
        throw ContractViolation("test_size must be a positive multiple of 3");

    Dataset ds;
    ds.dims = config.dims;
    ds.config = config;

    const int k_sep = calibrate_summands(config.dims, config.band, StateClass::Sep, config.seed);
    const int k_ppt = calibrate_summands(config.dims, config.band, StateClass::PptEnt, config.seed);
    const int k_nppt =
        calibrate_summands(config.dims, config.band, StateClass::NpptEnt, config.seed);
    ds.log.sep.k = k_sep;
    ds.log.ppt_ent.k = k_ppt;
    ds.log.nppt_ent.k = k_nppt;

    auto k_of = [&](StateClass c) {
        return c == StateClass::Sep ? k_sep : (c == StateClass::PptEnt ? k_ppt : k_nppt);
    };

    constexpr std::uint64_t kTrainTag = 1, kTestTag = 2;
    std::vector<SampleSpec> specs;
    const int half = config.train_size / 2;
    for (int i = 0; i < half; ++i)
        specs.push_back({StateClass::Sep, kTrainTag, i, i, true});
    for (int i = 0; i < half; ++i)
        specs.push_back({StateClass::PptEnt, kTrainTag, i, half + i, true});
    const int third = config.test_size / 3;
    StateClass order[3] = {StateClass::Sep, StateClass::PptEnt, StateClass::NpptEnt};
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < third; ++i)
            specs.push_back({order[c], kTestTag, i, c * third + i, false});

    std::vector<std::optional<LabeledState>> train_out(config.train_size);
    std::vector<std::optional<LabeledState>> test_out(config.test_size);
    // Per-thread stat buckets, merged after the join so totals are
    // independent of scheduling.
    const int jobs = std::max(1, config.jobs);
    std::vector<GenerationLog> partial(jobs);
    std::vector<std::string> errors(jobs);

    auto worker = [&](int w) {
        try {
            for (size_t s = static_cast<size_t>(w); s < specs.size(); s += static_cast<size_t>(jobs)) {
                const SampleSpec& spec = specs[s];
                ClassGenerationStats& bucket =
                    spec.label == StateClass::Sep
                        ? partial[w].sep
                        : (spec.label == StateClass::PptEnt ? partial[w].ppt_ent
                                                            : partial[w].nppt_ent);
                LabeledState st = generate_sample(config, spec.label, k_of(spec.label),
                                                  spec.split_tag, spec.index, bucket);
                if (spec.train)
                    train_out[static_cast<size_t>(spec.slot)] = std::move(st);
                else
                    test_out[static_cast<size_t>(spec.slot)] = std::move(st);
            }
        } catch (const std::exception& e) {
            errors[w] = e.what();
        }
    };

    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& err : errors)
        if (!err.empty()) throw GenerationExhausted(err);

    for (int w = 0; w < jobs; ++w) {
        auto merge = [](ClassGenerationStats& into, const ClassGenerationStats& from) {
            into.candidates += from.candidates;
            into.band_accepts += from.band_accepts;
            into.fw_runs += from.fw_runs;
            into.accepts += from.accepts;
        };
        merge(ds.log.sep, partial[w].sep);
        merge(ds.log.ppt_ent, partial[w].ppt_ent);
        merge(ds.log.nppt_ent, partial[w].nppt_ent);
    }

    ds.train.reserve(train_out.size());
    for (auto& s : train_out) ds.train.push_back(std::move(*s));
    ds.test.reserve(test_out.size());
    for (auto& s : test_out) ds.test.push_back(std::move(*s));
    return ds;
}

}  // namespace entanglekit
