#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "datacheck/dataset.hpp"
#include "datacheck/errors.hpp"
#include "datacheck/formula.hpp"

namespace datacheck {

// Brute-force reference implementations for tests. Everything here computes
// straight from the definitions: full sums over data and models, subset
// enumeration for maximal founded sets, exhaustive argmax for explanations.
// Deliberately slow; shares only the formula evaluator with the engine.

struct oracle_config {
    // Sum over all 2^|atoms| valuations instead of only observed models.
    // Confirms that unobserved models contribute nothing.
    bool enumerate_all_valuations = false;
    static constexpr std::size_t max_enum_atoms = 12;
    static constexpr std::size_t max_tuples = 1000000;
    static constexpr std::size_t max_subset_items = 20;
};

namespace oracle_detail {

inline std::vector<valuation> model_space(const dataset& ds, const oracle_config& cfg) {
    if (!cfg.enumerate_all_valuations) {
        return ds.models();
    }
    const std::size_t n = ds.vocab().size();
    if (n > oracle_config::max_enum_atoms) {
        throw cap_exceeded("enumeration over " + std::to_string(n) + " atoms");
    }
    std::vector<valuation> out;
    out.reserve(std::size_t(1) << n);
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        valuation v(n);
        for (std::size_t i = 0; i < n; ++i) v.set(i, (mask >> i) & 1);
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace oracle_detail

// p(X) = sum_k (1/K) prod_{beta@t in X} sum_n p(beta|m_n) p(m_n|d_k^t),
// with p(beta|m_n) the Bernoulli-mu interpretation and p(m_n|d_k^t) the
// completeness indicator. The model sum is evaluated literally.
inline long double oracle_joint(const dataset& ds, const condition& items, double mu_value,
                                const oracle_config& cfg = {}) {
    const std::vector<valuation> models = oracle_detail::model_space(ds, cfg);
    const long double mu_v = mu_value;
    long double total = 0.0L;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        long double w = 1.0L;
        for (const auto& item : items) {
            const valuation& instantiated = ds.model_of(k, item.time);
            long double item_prob = 0.0L;
            for (const valuation& m : models) {
                if (m != instantiated) continue; // p(m_n | d_k) = 0
                item_prob += eval(*item.f, m, ds.vocab()) ? mu_v : 1.0L - mu_v;
            }
            w *= item_prob;
        }
        total += w;
    }
    return total / static_cast<long double>(ds.size());
}

inline long double oracle_conditional(const dataset& ds, const condition& omega,
                                      const condition& delta, double mu_value,
                                      const oracle_config& cfg = {}) {
    condition both = omega;
    both.insert(both.end(), delta.begin(), delta.end());
    const long double den = oracle_joint(ds, delta, mu_value, cfg);
    if (den == 0.0L) {
        throw unfounded_condition_at_mu_one();
    }
    return oracle_joint(ds, both, mu_value, cfg) / den;
}

inline std::vector<long double> oracle_posterior(const dataset& ds, const condition& delta,
                                                 double mu_value, const oracle_config& cfg = {}) {
    const std::vector<valuation> models = oracle_detail::model_space(ds, cfg);
    const long double mu_v = mu_value;
    std::vector<long double> weights(ds.size(), 0.0L);
    long double total = 0.0L;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        long double w = 1.0L;
        for (const auto& item : delta) {
            const valuation& instantiated = ds.model_of(k, item.time);
            long double item_prob = 0.0L;
            for (const valuation& m : models) {
                if (m != instantiated) continue;
                item_prob += eval(*item.f, m, ds.vocab()) ? mu_v : 1.0L - mu_v;
            }
            w *= item_prob;
        }
        weights[k] = w;
        total += w;
    }
    if (total == 0.0L) {
        throw unfounded_condition_at_mu_one();
    }
    for (auto& w : weights) w /= total;
    return weights;
}

// Maximal founded subsets by explicit enumeration of all 2^|Delta|
// sub-multisets. Returns the satisfied content of each cardinality-maximal
// founded subset (deduplicated) and the union of their evidences.
struct oracle_mfs_result {
    int max_count = 0;
    std::vector<std::size_t> prime_evidence;            // sorted positions
    std::vector<std::vector<std::size_t>> subset_items; // item indices into Delta
};

inline oracle_mfs_result oracle_prime_evidence(const dataset& ds, const condition& delta) {
    if (delta.size() > oracle_config::max_subset_items) {
        throw cap_exceeded("subset enumeration over " + std::to_string(delta.size()) + " items");
    }
    oracle_mfs_result res;
    const std::size_t n = delta.size();
    std::vector<bool> prime(ds.size(), false);
    std::set<std::vector<std::pair<int, std::string>>> seen;

    for (std::size_t mask = 1; mask < (std::size_t(1) << n); ++mask) {
        std::vector<std::size_t> indices;
        for (std::size_t i = 0; i < n; ++i) {
            if ((mask >> i) & 1) indices.push_back(i);
        }
        std::vector<std::size_t> ev;
        for (std::size_t k = 0; k < ds.size(); ++k) {
            bool all = true;
            for (std::size_t i : indices) {
                if (!eval(*delta[i].f, ds.model_of(k, delta[i].time), ds.vocab())) {
                    all = false;
                    break;
                }
            }
            if (all) ev.push_back(k);
        }
        if (ev.empty()) continue;
        const int card = static_cast<int>(indices.size());
        if (card > res.max_count) {
            res.max_count = card;
            res.subset_items.clear();
            seen.clear();
            std::fill(prime.begin(), prime.end(), false);
        }
        if (card == res.max_count) {
            for (std::size_t k : ev) prime[k] = true;
            std::vector<std::pair<int, std::string>> key;
            for (std::size_t i : indices) key.emplace_back(delta[i].time, delta[i].f->str());
            std::sort(key.begin(), key.end());
            if (seen.insert(std::move(key)).second) {
                res.subset_items.push_back(std::move(indices));
            }
        }
    }
    for (std::size_t k = 0; k < ds.size(); ++k) {
        if (prime[k]) res.prime_evidence.push_back(k);
    }
    return res;
}

// Exhaustive most-likely-explanation search over per-time realization
// tuples. Candidates per time are the restrictions of the models observed at
// that time (or every assignment under enumerate_all_valuations).
struct oracle_explanation {
    long double best_score = 0.0L;
    std::vector<std::vector<std::vector<std::uint8_t>>> argmax; // realization paths
};

namespace oracle_detail {

inline std::vector<std::vector<std::uint8_t>> time_candidates(
    const dataset& ds, int t, const std::vector<std::size_t>& atom_idx,
    const oracle_config& cfg) {
    std::vector<std::vector<std::uint8_t>> out;
    if (cfg.enumerate_all_valuations) {
        if (atom_idx.size() > oracle_config::max_enum_atoms) {
            throw cap_exceeded("realization enumeration over " +
                               std::to_string(atom_idx.size()) + " atoms");
        }
        for (std::size_t mask = 0; mask < (std::size_t(1) << atom_idx.size()); ++mask) {
            std::vector<std::uint8_t> bits(atom_idx.size());
            for (std::size_t i = 0; i < atom_idx.size(); ++i) bits[i] = (mask >> i) & 1;
            out.push_back(std::move(bits));
        }
        return out;
    }
    for (std::size_t k = 0; k < ds.size(); ++k) {
        const valuation& v = ds.model_of(k, t);
        std::vector<std::uint8_t> bits(atom_idx.size());
        for (std::size_t i = 0; i < atom_idx.size(); ++i) bits[i] = v[atom_idx[i]] ? 1 : 0;
        if (std::find(out.begin(), out.end(), bits) == out.end()) {
            out.push_back(std::move(bits));
        }
    }
    return out;
}

inline condition tuple_condition(const std::vector<std::vector<std::uint8_t>>& path,
                                 const std::vector<int>& times,
                                 const std::vector<std::size_t>& atom_idx,
                                 const vocabulary& voc) {
    condition items;
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (std::size_t a = 0; a < atom_idx.size(); ++a) {
            formula_ptr lit = formula::make_atom(voc.name(atom_idx[a]));
            if (!path[i][a]) lit = formula::make_not(std::move(lit));
            items.push_back({std::move(lit), times[i]});
        }
    }
    return items;
}

template <class Score>
oracle_explanation search_tuples(const dataset& ds, const std::vector<std::string>& family,
                                 const std::vector<int>& times, const oracle_config& cfg,
                                 Score&& score) {
    std::vector<std::size_t> atom_idx;
    for (const auto& name : family) atom_idx.push_back(ds.vocab().index_of(name));
    std::sort(atom_idx.begin(), atom_idx.end());
    atom_idx.erase(std::unique(atom_idx.begin(), atom_idx.end()), atom_idx.end());

    std::vector<std::vector<std::vector<std::uint8_t>>> per_time;
    std::size_t tuples = 1;
    for (int t : times) {
        per_time.push_back(time_candidates(ds, t, atom_idx, cfg));
        tuples *= per_time.back().size();
        if (tuples > oracle_config::max_tuples) {
            throw cap_exceeded("explanation tuple space");
        }
    }

    oracle_explanation res;
    res.best_score = -1.0L;
    std::vector<std::size_t> pick(times.size(), 0);
    while (true) {
        std::vector<std::vector<std::uint8_t>> path;
        for (std::size_t i = 0; i < times.size(); ++i) path.push_back(per_time[i][pick[i]]);
        const long double s = score(tuple_condition(path, times, atom_idx, ds.vocab()), path);
        if (s > res.best_score) {
            res.best_score = s;
            res.argmax.clear();
            res.argmax.push_back(std::move(path));
        } else if (s == res.best_score) {
            res.argmax.push_back(std::move(path));
        }
        std::size_t i = 0;
        for (; i < times.size(); ++i) {
            if (++pick[i] < per_time[i].size()) break;
            pick[i] = 0;
        }
        if (i == times.size()) break;
    }
    return res;
}

} // namespace oracle_detail

// argmax over realization tuples of p(path, given) at finite mu, scored
// through the same full definitional sum as oracle_joint.
inline oracle_explanation oracle_explain_finite(const dataset& ds,
                                                const std::vector<std::string>& family,
                                                const std::vector<int>& times,
                                                const condition& given, double mu_value,
                                                const oracle_config& cfg = {}) {
    return oracle_detail::search_tuples(
        ds, family, times, cfg,
        [&](const condition& path_items, const auto&) -> long double {
            condition all = path_items;
            all.insert(all.end(), given.begin(), given.end());
            return oracle_joint(ds, all, mu_value, cfg);
        });
}

// argmax over realization tuples of |E(path) n E(given)'| with the prime
// evidence taken from subset enumeration.
inline oracle_explanation oracle_explain_limit(const dataset& ds,
                                               const std::vector<std::string>& family,
                                               const std::vector<int>& times,
                                               const condition& given,
                                               const oracle_config& cfg = {}) {
    std::vector<std::size_t> prime;
    if (given.empty()) {
        for (std::size_t k = 0; k < ds.size(); ++k) prime.push_back(k);
    } else {
        const oracle_mfs_result res = oracle_prime_evidence(ds, given);
        prime = res.prime_evidence;
        if (res.max_count == 0) {
            prime.clear();
            for (std::size_t k = 0; k < ds.size(); ++k) prime.push_back(k);
        }
    }
    return oracle_detail::search_tuples(
        ds, family, times, cfg,
        [&](const condition& path_items, const auto&) -> long double {
            long long hits = 0;
            for (std::size_t k : prime) {
                bool all = true;
                for (const auto& item : path_items) {
                    if (!eval(*item.f, ds.model_of(k, item.time), ds.vocab())) {
                        all = false;
                        break;
                    }
                }
                if (all) ++hits;
            }
            return static_cast<long double>(hits);
        });
}

} // namespace datacheck
