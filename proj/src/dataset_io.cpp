#include "entanglekit/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace entanglekit {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void save_split(std::ostream& os, const std::vector<LabeledState>& states,
                const SplitHeader& header) {
    os << "dims " << header.dims.dA << " " << header.dims.dB << "; count " << states.size()
       << "; band " << format_double(header.band_lo) << " " << format_double(header.band_hi)
       << "; seed " << header.seed << "\n";
    for (const auto& st : states) {
        os << state_class_tag(st.label) << " " << format_double(st.purity) << " "
           << st.summand_count << " "
           << (st.fw_distance ? format_double(*st.fw_distance) : std::string("-"));
        const CMatrix& m = st.rho.matrix();
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                os << " " << format_double(std::real(m(i, j))) << ","
                   << format_double(std::imag(m(i, j)));
        os << "\n";
    }
}

LoadedSplit load_split(std::istream& is) {
    LoadedSplit out;
    std::string line;
    if (!std::getline(is, line)) throw ContractViolation("split file is empty");
    int dA = 0, dB = 0, count = 0;
    double lo = 0, hi = 0;
    unsigned long long seed = 0;
    if (std::sscanf(line.c_str(), "dims %d %d; count %d; band %lf %lf; seed %llu", &dA, &dB,
                    &count, &lo, &hi, &seed) != 6)
        throw ContractViolation("malformed split header: " + line);
    out.header = {BipartiteDims(dA, dB), count, lo, hi, seed};
    const int d = dA * dB;
    out.states.reserve(static_cast<size_t>(count));
    for (int n = 0; n < count; ++n) {
        if (!std::getline(is, line))
            throw ContractViolation("split file truncated at state " + std::to_string(n));
        std::istringstream ls(line);
        std::string tag, fw_field;
        double purity_value = 0;
        int summands = 0;
        if (!(ls >> tag >> purity_value >> summands >> fw_field))
            throw ContractViolation("malformed state line " + std::to_string(n));
        LabeledState st{DensityMatrix(CMatrix::Identity(1, 1)), state_class_from_tag(tag),
                        purity_value, summands, std::nullopt, out.header.seed};
        if (fw_field != "-") st.fw_distance = std::strtod(fw_field.c_str(), nullptr);
        CMatrix m(d, d);
        std::string entry;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                if (!(ls >> entry))
                    throw ContractViolation("state line " + std::to_string(n) +
                                            " has too few matrix entries");
                const char* s = entry.c_str();
                char* mid = nullptr;
                const double re = std::strtod(s, &mid);
                if (mid == nullptr || *mid != ',')
                    throw ContractViolation("malformed complex entry: " + entry);
                const double im = std::strtod(mid + 1, nullptr);
                m(i, j) = Complex(re, im);
            }
        st.rho = DensityMatrix(std::move(m));
        out.states.push_back(std::move(st));
    }
    return out;
}

void save_split_file(const std::string& path, const std::vector<LabeledState>& states,
                     const SplitHeader& header) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    save_split(os, states, header);
}

LoadedSplit load_split_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return load_split(is);
}

void save_dataset(const std::string& dir, const Dataset& ds) {
    SplitHeader h{ds.dims, 0, ds.config.band.lo, ds.config.band.hi, ds.config.seed};
    save_split_file(dir + "/train.txt", ds.train, h);
    save_split_file(dir + "/test.txt", ds.test, h);
    std::ofstream log(dir + "/generation_log.txt", std::ios::binary);
    log << "dims " << ds.dims.dA << " " << ds.dims.dB << "\n"
        << "train " << ds.train.size() << " test " << ds.test.size() << "\n"
        << "band " << format_double(ds.config.band.lo) << " " << format_double(ds.config.band.hi)
        << "\nseed " << ds.config.seed << "\n"
        << ds.log.to_string();

    double sum[3] = {0, 0, 0}, sumsq[3] = {0, 0, 0};
    int count[3] = {0, 0, 0};
    auto tally = [&](const std::vector<LabeledState>& states) {
        for (const auto& s : states) {
            const int c = static_cast<int>(s.label);
            sum[c] += s.purity;
            sumsq[c] += s.purity * s.purity;
            ++count[c];
        }
    };
    tally(ds.train);
    tally(ds.test);
    for (StateClass c : {StateClass::Sep, StateClass::PptEnt, StateClass::NpptEnt}) {
        const int i = static_cast<int>(c);
        if (count[i] == 0) continue;
        const double mean = sum[i] / count[i];
        const double sd = std::sqrt(std::max(0.0, sumsq[i] / count[i] - mean * mean));
        log << "purity " << state_class_tag(c) << " mean " << format_double(mean) << " stddev "
            << format_double(sd) << " n " << count[i] << "\n";
    }
}

std::uint64_t file_content_hash(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for hashing: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
        const std::streamsize got = is.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!is) break;
    }
    return h;
}

}  // namespace entanglekit
