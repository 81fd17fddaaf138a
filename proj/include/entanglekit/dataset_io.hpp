#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "entanglekit/datagen.hpp"

namespace entanglekit {

/// Line-delimited split file:
///   header  `dims dA dB; count N; band lo hi; seed S`
///   state   `LABEL purity summands fw_distance|- re,im re,im ...` (d^2 entries, row-major)
/// All doubles print with 17 significant digits so files round-trip bit-exactly.

struct SplitHeader {
    BipartiteDims dims{3, 3};
    int count = 0;
    double band_lo = 0.0;
    double band_hi = 1.0;
    std::uint64_t seed = 0;
};

struct LoadedSplit {
    SplitHeader header;
    std::vector<LabeledState> states;
};

void save_split(std::ostream& os, const std::vector<LabeledState>& states,
                const SplitHeader& header);
LoadedSplit load_split(std::istream& is);

void save_split_file(const std::string& path, const std::vector<LabeledState>& states,
                     const SplitHeader& header);
LoadedSplit load_split_file(const std::string& path);

/// Convenience: dataset -> train/test files plus the generation log.
void save_dataset(const std::string& dir, const Dataset& ds);

std::string format_double(double v);  // %.17g

/// FNV-1a over a file's bytes; used to stamp model manifests with the
/// training data they came from.
std::uint64_t file_content_hash(const std::string& path);

}  // namespace entanglekit
