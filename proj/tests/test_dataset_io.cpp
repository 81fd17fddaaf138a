#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "entanglekit/dataset_io.hpp"

using namespace entanglekit;

namespace {

std::vector<LabeledState> sample_states(int n, std::uint64_t seed) {
    std::vector<LabeledState> out;
    const BipartiteDims dims(3, 3);
    for (int i = 0; i < n; ++i) {
        RandomStream rng(seed + static_cast<std::uint64_t>(i));
        CMatrix rho = random_separable(dims, 2 + i % 3, rng);
        LabeledState st{DensityMatrix(rho),
                        i % 3 == 0 ? StateClass::Sep
                                   : (i % 3 == 1 ? StateClass::PptEnt : StateClass::NpptEnt),
                        purity(rho),
                        2 + i % 3,
                        std::nullopt,
                        seed};
        if (st.label == StateClass::PptEnt) st.fw_distance = 0.0123456789012345678 + i;
        out.push_back(std::move(st));
    }
    return out;
}

}  // namespace

TEST_CASE("split files round-trip bit-exactly") {
    const auto states = sample_states(7, 500);
    const SplitHeader header{BipartiteDims(3, 3), 7, 0.15, 0.17, 500};

    std::ostringstream first;
    save_split(first, states, header);

    std::istringstream parse(first.str());
    const LoadedSplit loaded = load_split(parse);
    CHECK(loaded.header.dims.dA == 3);
    CHECK(loaded.header.count == 7);
    CHECK(loaded.header.band_lo == 0.15);
    CHECK(loaded.header.seed == 500);
    REQUIRE(loaded.states.size() == 7);

    for (size_t i = 0; i < states.size(); ++i) {
        CHECK(loaded.states[i].label == states[i].label);
        CHECK(loaded.states[i].purity == states[i].purity);  // bitwise
        CHECK(loaded.states[i].summand_count == states[i].summand_count);
        CHECK(loaded.states[i].fw_distance == states[i].fw_distance);
        CHECK((loaded.states[i].rho.matrix() - states[i].rho.matrix()).norm() == 0.0);
    }

    std::ostringstream second;
    save_split(second, loaded.states, loaded.header);
    CHECK(first.str() == second.str());  // byte-identical
}

TEST_CASE("file-level helpers and content hash") {
    const auto states = sample_states(3, 600);
    const SplitHeader header{BipartiteDims(3, 3), 3, 0.1, 0.9, 600};
    const std::string path = "/tmp/entanglekit_io_test.txt";
    save_split_file(path, states, header);
    const LoadedSplit loaded = load_split_file(path);
    CHECK(loaded.states.size() == 3);

    const std::uint64_t h1 = file_content_hash(path);
    const std::uint64_t h2 = file_content_hash(path);
    CHECK(h1 == h2);
    save_split_file(path, sample_states(3, 601), header);
    CHECK(file_content_hash(path) != h1);
    std::remove(path.c_str());
}

TEST_CASE("malformed inputs are rejected with diagnostics") {
    std::istringstream empty("");
    CHECK_THROWS_AS(load_split(empty), ContractViolation);

    std::istringstream bad_header("dims 3; count 1\n");
    CHECK_THROWS_AS(load_split(bad_header), ContractViolation);

    std::istringstream truncated("dims 2 2; count 2; band 0.1 0.9; seed 5\n");
    CHECK_THROWS_AS(load_split(truncated), ContractViolation);

    // a state line with too few entries
    std::ostringstream os;
    const auto states = sample_states(1, 700);
    save_split(os, states, {BipartiteDims(3, 3), 1, 0.0, 1.0, 700});
    std::string text = os.str();
    text = text.substr(0, text.size() - 30);
    std::istringstream cut(text);
    CHECK_THROWS_AS(load_split(cut), ContractViolation);

    std::istringstream bad_tag(
        "dims 2 2; count 1; band 0 1; seed 1\nBOGUS 0.5 1 - 0.5,0 0,0 0,0 0.5,0\n");
    CHECK_THROWS_AS(load_split(bad_tag), ContractViolation);
}

TEST_CASE("loading validates the density-matrix invariants") {
    // hand-written state with trace 2 must be rejected
    std::istringstream bad(
        "dims 2 2; count 1; band 0 1; seed 1\n"
        "SEP 0.5 1 - 1,0 0,0 0,0 0,0 0,0 1,0 0,0 0,0 0,0 0,0 0,0 0,0 0,0 0,0 0,0 0,0\n");
    // line above is a 4x4 with trace 2
    CHECK_THROWS_AS(load_split(bad), ContractViolation);
}

TEST_CASE("format_double keeps every bit of a double") {
    RandomStream rng(1);
    for (int rep = 0; rep < 1000; ++rep) {
        const double v = rng.gaussian() * std::pow(10.0, rng.gaussian() * 3.0);
        const double back = std::strtod(format_double(v).c_str(), nullptr);
        CHECK(back == v);
    }
}
