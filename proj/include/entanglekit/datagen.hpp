#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entanglekit/qstate.hpp"
#include "entanglekit/rng.hpp"

namespace entanglekit {

enum class StateClass { Sep, PptEnt, NpptEnt };

const char* state_class_tag(StateClass c);
StateClass state_class_from_tag(const std::string& tag);

/// One generated sample with its provenance.
struct LabeledState {
    DensityMatrix rho;
    StateClass label;
    double purity;
    int summand_count;
    std::optional<double> fw_distance;  // only for PPT-entangled samples
    std::uint64_t seed;
};

/// Per-sample purity acceptance window plus the target the calibration
/// aimed for (mean/stddev are descriptive).
struct PurityBand {
    double mean;
    double stddev;
    double lo;
    double hi;
};

struct GenerationConfig {
    BipartiteDims dims{3, 3};
    int train_size = 2000;  // 50% SEP + 50% PPT_ENT
    int test_size = 600;    // equal thirds SEP / PPT_ENT / NPPT_ENT
    PurityBand band{0.0, 0.0, 0.0, 1.0};
    std::uint64_t seed = 1;
    int fw_iterations = 1000;
    double fw_threshold = 0.01;
    int max_tries = 200000;
    int jobs = 1;
};

/// Default band for the tabulated system sizes (endpoints chosen so the
/// three class generators calibrate to overlapping purity laws).
PurityBand default_purity_band(const BipartiteDims& dims);

struct ClassGenerationStats {
    int k = 0;                   // calibrated summand count
    long long candidates = 0;    // raw draws
    long long band_accepts = 0;  // draws inside the purity window
    long long fw_runs = 0;       // Frank-Wolfe evaluations (PPT_ENT only)
    long long accepts = 0;       // finished samples
};

struct GenerationLog {
    ClassGenerationStats sep, ppt_ent, nppt_ent;
    std::string to_string() const;
};

struct Dataset {
    BipartiteDims dims{3, 3};
    std::vector<LabeledState> train;
    std::vector<LabeledState> test;
    GenerationConfig config;
    GenerationLog log;
};

/// rho = A^dagger A / tr(A^dagger A) with A an i.i.d. complex Gaussian matrix.
CMatrix random_density(int d, RandomStream& rng);

/// Flat-Dirichlet mixture of k product states; separable by construction.
CMatrix random_separable(const BipartiteDims& dims, int k, RandomStream& rng);

/// Flat-Dirichlet mixture of k full-dimension random states (no class
/// conditioning); the raw material of both entangled-class generators.
CMatrix random_mixture(int d, int k, RandomStream& rng);

/// Flat-Dirichlet mixture of k full-dimension states, rejected until the
/// PPT criterion fails.
CMatrix random_nppt(const BipartiteDims& dims, int k, RandomStream& rng, int max_tries);

struct FwResult {
    CMatrix sigma;    // separable approximation (convex mixture of products)
    double distance;  // Hilbert-Schmidt norm |rho - sigma|
};

/// Frank-Wolfe search for the nearest separable state: the linear oracle is
/// the largest Schmidt pair of the top eigenvector of (rho - rho_t), with
/// step size 2/(t+2).
FwResult frank_wolfe_nearest_separable(const CMatrix& rho, const BipartiteDims& dims, int T,
                                       RandomStream& rng);

/// Rejection loop: mixtures of k states until PPT holds and the Frank-Wolfe
/// distance exceeds the threshold.
LabeledState generate_ppt_entangled(const BipartiteDims& dims, int k, double threshold, int T,
                                    RandomStream& rng, int max_tries);

/// Smallest k whose mean purity over 200 unfiltered samples of the class
/// generator lands inside [band.lo, band.hi]. Doubling then bisection;
/// throws CalibrationError (with the mean-vs-k table) when no k fits.
int calibrate_summands(const BipartiteDims& dims, const PurityBand& band, StateClass label,
                       std::uint64_t seed);

/// Full dataset: calibrates k per class, then generates all samples on
/// per-sample substreams (deterministic for any job count).
Dataset build_dataset(const GenerationConfig& config);

}  // namespace entanglekit
