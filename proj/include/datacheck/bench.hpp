#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "datacheck/engine.hpp"

namespace datacheck {

// Scaling harness: synthetic datasets and wall-clock measurements for the
// linear-time claim, shared by the CLI bench command and the test suite.

inline dataset synth_dataset(std::size_t sequence_count, std::size_t atom_count,
                             std::size_t horizon, std::uint64_t seed) {
    std::vector<std::string> names;
    names.reserve(atom_count);
    for (std::size_t i = 0; i < atom_count; ++i) names.push_back("x" + std::to_string(i + 1));
    vocabulary voc(names, true);

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution bit(0.5);
    std::vector<data_sequence> seqs;
    seqs.reserve(sequence_count);
    for (std::size_t k = 0; k < sequence_count; ++k) {
        data_sequence s;
        s.id = "s" + std::to_string(k + 1);
        for (std::size_t t = 0; t < horizon; ++t) {
            valuation v(atom_count);
            for (std::size_t i = 0; i < atom_count; ++i) v.set(i, bit(rng));
            s.steps.push_back(std::move(v));
        }
        seqs.push_back(std::move(s));
    }
    return dataset(std::move(voc), std::move(seqs));
}

// A fixed query shape: single-literal target, `width` timed literals in the
// condition, spread over the horizon.
inline std::pair<condition, condition> bench_query(std::size_t atom_count, std::size_t horizon,
                                                   std::size_t width) {
    condition target{{formula::make_atom("x1"), 1}};
    condition given;
    for (std::size_t i = 0; i < width; ++i) {
        formula_ptr lit = formula::make_atom("x" + std::to_string((i % atom_count) + 1));
        if (i % 2 == 1) lit = formula::make_not(std::move(lit));
        given.push_back({std::move(lit), static_cast<int>((i % horizon) + 1)});
    }
    return {std::move(target), std::move(given)};
}

struct bench_row {
    std::size_t sequence_count = 0;
    double mean_query_seconds = 0.0;
    double per_datum_ns = 0.0;
};

// Median-of-reps mean query time for limit-mode conditional at each K.
inline std::vector<bench_row> run_scaling(const std::vector<std::size_t>& k_values,
                                          std::size_t atom_count, std::size_t horizon,
                                          std::size_t reps, std::uint64_t seed = 20240001) {
    const auto [target, given] = bench_query(atom_count, horizon, 8);
    std::vector<bench_row> rows;
    for (std::size_t K : k_values) {
        const dataset ds = synth_dataset(K, atom_count, horizon, seed);
        // enough inner iterations to dominate clock granularity
        const std::size_t inner = std::max<std::size_t>(1, 200000 / std::max<std::size_t>(K, 1)) + 2;
        std::vector<double> samples;
        volatile double sink = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const auto start = std::chrono::steady_clock::now();
            for (std::size_t i = 0; i < inner; ++i) {
                sink = sink + conditional(ds, target, given, mu::limit()).value();
            }
            const auto stop = std::chrono::steady_clock::now();
            samples.push_back(std::chrono::duration<double>(stop - start).count() /
                              static_cast<double>(inner));
        }
        std::sort(samples.begin(), samples.end());
        const double median = samples[samples.size() / 2];
        rows.push_back({K, median, median / static_cast<double>(K) * 1e9});
    }
    return rows;
}

// The same marginal computed two ways: a data scan, and a model-checking
// sweep over all 2^|atoms| valuations weighted by observed counts. Both
// return identical values; only the costs differ.
inline rational marginal_by_data_checking(const dataset& ds, const condition& target) {
    return marginal(ds, target, mu::limit()).ratio();
}

inline rational marginal_by_model_checking(const dataset& ds, const formula& f, int t) {
    const std::size_t n = ds.vocab().size();
    if (n > 20) {
        throw cap_exceeded("model checking over " + std::to_string(n) + " atoms");
    }
    long long hits = 0;
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        valuation v(n);
        for (std::size_t i = 0; i < n; ++i) v.set(i, (mask >> i) & 1);
        if (!eval(f, v, ds.vocab())) continue;
        if (auto id = ds.find_model(v)) {
            hits += ds.model_count(*id, t);
        }
    }
    return rational(hits, static_cast<long long>(ds.size()));
}

template <class F>
double time_seconds(F&& fn, std::size_t reps) {
    std::vector<double> samples;
    for (std::size_t r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const auto stop = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double>(stop - start).count());
    }
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
}

} // namespace datacheck
