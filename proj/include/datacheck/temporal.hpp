#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "datacheck/engine.hpp"

namespace datacheck {

// The four temporal inference patterns. Prediction, filtering and smoothing
// are one computation: nothing here cares whether the target time precedes
// or follows the evidence window.

inline prob query(const dataset& ds, const condition& target, const condition& given, mu m) {
    return conditional(ds, target, given, m);
}

inline std::vector<prob> reference(const dataset& ds, const condition& given, mu m) {
    return posterior_data(ds, given, m);
}

// Per-atom conditional over a family at one time, emitted in vocabulary
// order. Equals conditional({atom@u}, given, m) entry by entry.
inline std::vector<std::pair<std::string, prob>> distribution(
    const dataset& ds, const std::vector<std::string>& family, int u,
    const condition& given, mu m) {
    if (family.empty()) {
        throw error("distribution needs a nonempty atom family");
    }
    ds.check_time(u);
    std::vector<std::size_t> atom_idx;
    for (const auto& name : family) atom_idx.push_back(ds.vocab().index_of(name));
    std::sort(atom_idx.begin(), atom_idx.end());
    atom_idx.erase(std::unique(atom_idx.begin(), atom_idx.end()), atom_idx.end());

    std::vector<std::pair<std::string, prob>> out;
    out.reserve(atom_idx.size());
    if (m.is_limit()) {
        const mfs_result res = mfs(ds, given);
        std::vector<std::size_t> pool = res.prime_evidence;
        if (res.max_count == 0) {
            pool.resize(ds.size());
            for (std::size_t k = 0; k < ds.size(); ++k) pool[k] = k;
        }
        for (std::size_t i : atom_idx) {
            long long hits = 0;
            for (std::size_t k : pool) {
                if (ds.model_of(k, u)[i]) ++hits;
            }
            out.emplace_back(ds.vocab().name(i),
                             prob::exact(rational(hits, static_cast<long long>(pool.size()))));
        }
        return out;
    }
    std::vector<long double> weights(ds.size());
    long double total = 0.0L;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        weights[k] = detail::finite_weight(m.value(), satisfied_count(ds, k, given), given.size());
        total += weights[k];
    }
    if (total == 0.0L) {
        throw unfounded_condition_at_mu_one();
    }
    const long double mu_v = m.value();
    for (std::size_t i : atom_idx) {
        long double num = 0.0L;
        for (std::size_t k = 0; k < ds.size(); ++k) {
            num += weights[k] * (ds.model_of(k, u)[i] ? mu_v : 1.0L - mu_v);
        }
        out.emplace_back(ds.vocab().name(i), prob::approx(static_cast<double>(num / total)));
    }
    return out;
}

// A realization path over the query atoms: path[i] assigns every family atom
// at times[i]. Co-optimal alternatives are reported alongside the winner.
struct explanation {
    std::vector<int> times;                              // ascending
    std::vector<std::string> family;                     // vocabulary order
    std::vector<std::vector<std::uint8_t>> path;         // [time][family atom]
    prob probability;                                    // p(path | given)
    double score = 0.0;                                  // argmax objective
    std::vector<std::vector<std::vector<std::uint8_t>>> ties; // all argmax paths
};

namespace detail {

inline std::vector<std::vector<std::uint8_t>> realization_of(
    const dataset& ds, std::size_t k, const std::vector<int>& times,
    const std::vector<std::size_t>& atom_idx) {
    std::vector<std::vector<std::uint8_t>> r;
    r.reserve(times.size());
    for (int t : times) {
        const valuation& v = ds.model_of(k, t);
        std::vector<std::uint8_t> bits(atom_idx.size());
        for (std::size_t i = 0; i < atom_idx.size(); ++i) bits[i] = v[atom_idx[i]] ? 1 : 0;
        r.push_back(std::move(bits));
    }
    return r;
}

inline condition realization_condition(const std::vector<std::vector<std::uint8_t>>& path,
                                        const std::vector<int>& times,
                                        const std::vector<std::string>& family) {
    condition items;
    for (std::size_t i = 0; i < times.size(); ++i) {
        formula_ptr conj;
        for (std::size_t a = 0; a < family.size(); ++a) {
            formula_ptr lit = formula::make_atom(family[a]);
            if (!path[i][a]) lit = formula::make_not(std::move(lit));
            conj = conj ? formula::make_and(std::move(conj), std::move(lit)) : std::move(lit);
        }
        items.push_back({std::move(conj), times[i]});
    }
    return items;
}

} // namespace detail

// Most likely explanation: the realization path of the query atoms that
// maximizes the posterior given the condition. Candidates are the observed
// sequences' own realizations (anything else scores zero under mu = 1 and in
// the limit); ties break on first occurrence in dataset order and the full
// tie set is returned.
inline explanation explain(const dataset& ds, const std::vector<std::string>& query_atoms,
                           std::vector<int> times, const condition& given, mu m) {
    if (query_atoms.empty()) {
        throw error("explain needs a nonempty atom family");
    }
    std::vector<std::size_t> atom_idx;
    for (const auto& name : query_atoms) atom_idx.push_back(ds.vocab().index_of(name));
    std::sort(atom_idx.begin(), atom_idx.end());
    atom_idx.erase(std::unique(atom_idx.begin(), atom_idx.end()), atom_idx.end());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    for (int t : times) ds.check_time(t);
    detail::check_condition(ds, given);

    explanation result;
    result.times = times;
    for (std::size_t i : atom_idx) result.family.push_back(ds.vocab().name(i));

    // candidate pool: prime evidence in limit mode, all data otherwise
    std::vector<std::size_t> pool;
    long long denom = 0; // |E(given)'| in limit mode
    if (m.is_limit()) {
        const mfs_result res = mfs(ds, given);
        pool = res.prime_evidence;
        if (res.max_count == 0) {
            pool.resize(ds.size());
            for (std::size_t k = 0; k < ds.size(); ++k) pool[k] = k;
        }
        denom = static_cast<long long>(pool.size());
    } else {
        pool.resize(ds.size());
        for (std::size_t k = 0; k < ds.size(); ++k) pool[k] = k;
        if (m.value() == 1.0 && evidence(ds, given).empty()) {
            throw unfounded_condition_at_mu_one();
        }
    }

    // distinct candidate realizations, first-occurrence order
    std::vector<std::vector<std::vector<std::uint8_t>>> candidates;
    for (std::size_t k : pool) {
        auto r = detail::realization_of(ds, k, times, atom_idx);
        if (std::find(candidates.begin(), candidates.end(), r) == candidates.end()) {
            candidates.push_back(std::move(r));
        }
    }

    auto score_of = [&](const std::vector<std::vector<std::uint8_t>>& r) -> long double {
        if (m.is_limit()) {
            long long hits = 0;
            for (std::size_t k : pool) {
                if (detail::realization_of(ds, k, times, atom_idx) == r) ++hits;
            }
            return static_cast<long double>(hits);
        }
        // sum over all data of the Bernoulli product for realization and given
        const long double mu_v = m.value();
        long double sum = 0.0L;
        for (std::size_t k = 0; k < ds.size(); ++k) {
            long double w = detail::finite_weight(m.value(), satisfied_count(ds, k, given),
                                                  given.size());
            for (std::size_t i = 0; i < times.size() && w != 0.0L; ++i) {
                const valuation& v = ds.model_of(k, times[i]);
                for (std::size_t a = 0; a < atom_idx.size(); ++a) {
                    const bool agree = (v[atom_idx[a]] ? 1 : 0) == r[i][a];
                    w *= agree ? mu_v : 1.0L - mu_v;
                }
            }
            sum += w;
        }
        return sum;
    };

    long double best = -1.0L;
    for (const auto& r : candidates) {
        const long double s = score_of(r);
        if (s > best) {
            best = s;
            result.path = r;
            result.ties.clear();
            result.ties.push_back(r);
        } else if (s == best) {
            result.ties.push_back(r);
        }
    }
    result.score = static_cast<double>(best);

    if (times.empty()) {
        result.probability = prob::exact(rational(1));
        if (!m.is_limit()) result.probability = prob::approx(1.0);
        return result;
    }
    const condition target = detail::realization_condition(result.path, times, result.family);
    if (m.is_limit()) {
        // pool is E(given)' already; the ratio is score over its size
        result.probability =
            prob::exact(rational(static_cast<long long>(best), denom));
    } else {
        result.probability = conditional(ds, target, given, m);
    }
    return result;
}

} // namespace datacheck
