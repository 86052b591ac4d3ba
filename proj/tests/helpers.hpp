#pragma once

#include <fstream>
#include <string>

#include "datacheck/dataset.hpp"
#include "datacheck/parser.hpp"

namespace testutil {

inline datacheck::dataset load_fixture(const std::string& name) {
    const std::string path = std::string(DATACHECK_FIXTURE_DIR) + "/" + name;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing fixture " + path);
    return datacheck::dataset::load(in);
}

inline const datacheck::dataset& weather() {
    static const datacheck::dataset ds = load_fixture("weather.json");
    return ds;
}

inline const datacheck::dataset& maze() {
    static const datacheck::dataset ds = load_fixture("maze.json");
    return ds;
}

// Timed NESW observation literals, e.g. obs("1011", 1) -> N@1,!E@1,S@1,W@1.
inline datacheck::condition obs(const std::string& bits, int t) {
    return datacheck::parse_condition("OBS NESW=" + bits + " @" + std::to_string(t));
}

inline datacheck::condition operator+(datacheck::condition a, const datacheck::condition& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// Valuation over a dataset's vocabulary from the list of true atom names.
inline datacheck::valuation val_of(const datacheck::dataset& ds,
                                   const std::vector<std::string>& true_atoms) {
    datacheck::valuation v(ds.vocab().size());
    for (const auto& name : true_atoms) v.set(ds.vocab().index_of(name), true);
    return v;
}

} // namespace testutil
