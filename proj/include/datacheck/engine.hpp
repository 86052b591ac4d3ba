#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "datacheck/dataset.hpp"
#include "datacheck/errors.hpp"
#include "datacheck/formula.hpp"
#include "datacheck/rational.hpp"

namespace datacheck {

// Interpretation strength. Limit mode evaluates the mu->1 semantics exactly
// (rational counts); finite mode evaluates the Bernoulli-mu semantics in
// floating point.
class mu {
public:
    static mu limit() { return mu(std::nullopt); }
    static mu finite(double value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw error("mu must lie in [0,1]");
        }
        return mu(value);
    }

    bool is_limit() const { return !value_.has_value(); }
    double value() const { return *value_; }

private:
    explicit mu(std::optional<double> v) : value_(v) {}
    std::optional<double> value_;
};

// A probability: exact rational in limit mode, floating point in finite mode.
class prob {
public:
    prob() : prob(rational(0), 0.0, true) {}
    static prob exact(rational r) { return prob(std::move(r), 0.0, true); }
    static prob approx(double v) { return prob(rational(), v, false); }

    bool is_exact() const { return exact_; }
    const rational& ratio() const {
        if (!exact_) throw error("probability is not exact");
        return ratio_;
    }
    double value() const { return exact_ ? ratio_.to_double() : value_; }

private:
    prob(rational r, double v, bool exact) : ratio_(std::move(r)), value_(v), exact_(exact) {}
    rational ratio_;
    double value_;
    bool exact_;
};

namespace detail {

inline void check_condition(const dataset& ds, const condition& items) {
    for (const auto& item : items) ds.check_time(item.time);
}

// Bernoulli factor mu^truth (1-mu)^(1-truth) accumulated over a whole
// condition for one sequence: mu^s (1-mu)^(n-s) with s the satisfied count.
inline long double finite_weight(double m, int satisfied, std::size_t total) {
    const long double mu_v = m;
    const long double co = 1.0L - mu_v;
    long double w = 1.0L;
    for (int i = 0; i < satisfied; ++i) w *= mu_v;
    for (std::size_t i = static_cast<std::size_t>(satisfied); i < total; ++i) w *= co;
    return w;
}

} // namespace detail

// |Delta|_{m(d_k)}: how many items of the condition (with multiplicity) hold
// in sequence k at their times.
inline int satisfied_count(const dataset& ds, std::size_t k, const condition& items) {
    detail::check_condition(ds, items);
    ds.check_sequence(k);
    int count = 0;
    for (const auto& item : items) {
        if (eval(*item.f, ds.model_of(k, item.time), ds.vocab())) ++count;
    }
    return count;
}

// E(Delta): zero-based positions of the sequences satisfying every item.
inline std::vector<std::size_t> evidence(const dataset& ds, const condition& items) {
    detail::check_condition(ds, items);
    std::vector<std::size_t> out;
    const int want = static_cast<int>(items.size());
    for (std::size_t k = 0; k < ds.size(); ++k) {
        if (satisfied_count(ds, k, items) == want) out.push_back(k);
    }
    return out;
}

// Cardinality-maximal founded subsets, computed by the argmax-count
// construction: every sequence pins down the sub-multiset of items it
// satisfies; the sequences attaining the maximal count c are exactly the
// prime evidence, and their satisfied sub-multisets are the MFS. One pass,
// O(K * |Delta| * formula size). c = 0 means no singleton is founded; the
// result then carries empty prime evidence to signal that regime.
struct mfs_result {
    int max_count = 0;                        // c
    std::vector<std::size_t> prime_evidence;  // E(Delta)' as sequence positions
    std::vector<condition> subsets;           // deduplicated satisfied sub-multisets
};

inline mfs_result mfs(const dataset& ds, const condition& items) {
    detail::check_condition(ds, items);
    mfs_result res;
    std::vector<int> counts(ds.size(), 0);
    for (std::size_t k = 0; k < ds.size(); ++k) {
        counts[k] = satisfied_count(ds, k, items);
        res.max_count = std::max(res.max_count, counts[k]);
    }
    if (res.max_count == 0) {
        return res;
    }
    std::set<std::vector<std::pair<int, std::string>>> seen;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        if (counts[k] != res.max_count) continue;
        res.prime_evidence.push_back(k);
        condition subset;
        for (const auto& item : items) {
            if (eval(*item.f, ds.model_of(k, item.time), ds.vocab())) {
                subset.push_back(item);
            }
        }
        // dedup on multiset content, not on item positions
        std::vector<std::pair<int, std::string>> key;
        for (const auto& item : subset) key.emplace_back(item.time, item.f->str());
        std::sort(key.begin(), key.end());
        if (seen.insert(std::move(key)).second) {
            res.subsets.push_back(std::move(subset));
        }
    }
    return res;
}

// p(Omega) with an empty condition as the empty product.
inline prob marginal(const dataset& ds, const condition& omega, mu m) {
    detail::check_condition(ds, omega);
    if (m.is_limit()) {
        return prob::exact(rational(static_cast<long long>(evidence(ds, omega).size()),
                                    static_cast<long long>(ds.size())));
    }
    long double sum = 0.0L;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        sum += detail::finite_weight(m.value(), satisfied_count(ds, k, omega), omega.size());
    }
    return prob::approx(static_cast<double>(sum / static_cast<long double>(ds.size())));
}

// p(Omega | Delta). Limit mode: the ratio |E(Omega) n E(Delta)'| / |E(Delta)'|
// with prime evidence widening to all data when c = 0, which reproduces the
// unconditioned marginal exactly. Finite mode: the Bernoulli-mu quotient.
inline prob conditional(const dataset& ds, const condition& omega, const condition& delta, mu m) {
    detail::check_condition(ds, omega);
    detail::check_condition(ds, delta);
    if (m.is_limit()) {
        const mfs_result res = mfs(ds, delta);
        std::vector<std::size_t> prime = res.prime_evidence;
        if (res.max_count == 0) {
            prime.resize(ds.size());
            for (std::size_t k = 0; k < ds.size(); ++k) prime[k] = k;
        }
        const int want = static_cast<int>(omega.size());
        long long hits = 0;
        for (std::size_t k : prime) {
            if (satisfied_count(ds, k, omega) == want) ++hits;
        }
        return prob::exact(rational(hits, static_cast<long long>(prime.size())));
    }
    long double num = 0.0L;
    long double den = 0.0L;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        const long double wd =
            detail::finite_weight(m.value(), satisfied_count(ds, k, delta), delta.size());
        const long double wo =
            detail::finite_weight(m.value(), satisfied_count(ds, k, omega), omega.size());
        num += wo * wd;
        den += wd;
    }
    if (den == 0.0L) {
        throw unfounded_condition_at_mu_one();
    }
    return prob::approx(static_cast<double>(num / den));
}

// p(D | Delta) over sequence occurrences, aligned with dataset order.
// Limit mode: uniform over prime evidence, or the 1/K prior when c = 0.
inline std::vector<prob> posterior_data(const dataset& ds, const condition& delta, mu m) {
    detail::check_condition(ds, delta);
    std::vector<prob> out;
    out.reserve(ds.size());
    if (m.is_limit()) {
        const mfs_result res = mfs(ds, delta);
        if (res.max_count == 0) {
            out.assign(ds.size(), prob::exact(rational(1, static_cast<long long>(ds.size()))));
            return out;
        }
        std::vector<bool> in_prime(ds.size(), false);
        for (std::size_t k : res.prime_evidence) in_prime[k] = true;
        const rational share(1, static_cast<long long>(res.prime_evidence.size()));
        for (std::size_t k = 0; k < ds.size(); ++k) {
            out.push_back(prob::exact(in_prime[k] ? share : rational(0)));
        }
        return out;
    }
    std::vector<long double> weights(ds.size(), 0.0L);
    long double total = 0.0L;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        weights[k] = detail::finite_weight(m.value(), satisfied_count(ds, k, delta), delta.size());
        total += weights[k];
    }
    if (total == 0.0L) {
        throw unfounded_condition_at_mu_one();
    }
    for (std::size_t k = 0; k < ds.size(); ++k) {
        out.push_back(prob::approx(static_cast<double>(weights[k] / total)));
    }
    return out;
}

// p(m_n^t, m_o^u, ...) = K_{n,o,...}/K, the count-ratio estimate.
inline rational model_joint(const dataset& ds, const std::vector<std::pair<valuation, int>>& pairs) {
    return rational(ds.joint_model_count(pairs), static_cast<long long>(ds.size()));
}

// p(alpha^t, beta^u, ...) by summing joint model-tuple frequencies over the
// satisfying models per time. Independent route to the same value as
// marginal(items, limit): it evaluates formulas on distinct models only and
// aggregates observed tuple counts.
inline rational formula_joint(const dataset& ds, const condition& items) {
    detail::check_condition(ds, items);
    if (items.empty()) return rational(1);

    std::vector<int> times;
    for (const auto& item : items) times.push_back(item.time);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    // per time, the set of observed models satisfying every item at that time
    std::map<int, std::vector<bool>> satisfying;
    for (int t : times) {
        std::vector<bool> ok(ds.models().size(), true);
        for (const auto& item : items) {
            if (item.time != t) continue;
            for (std::size_t n = 0; n < ds.models().size(); ++n) {
                if (ok[n] && !eval(*item.f, ds.models()[n], ds.vocab())) ok[n] = false;
            }
        }
        satisfying.emplace(t, std::move(ok));
    }

    // observed model-id tuples over `times` with their joint counts
    std::map<std::vector<std::size_t>, long long> tuple_counts;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        std::vector<std::size_t> tuple;
        tuple.reserve(times.size());
        for (int t : times) tuple.push_back(ds.model_id(k, t));
        ++tuple_counts[tuple];
    }

    long long total = 0;
    for (const auto& [tuple, count] : tuple_counts) {
        bool all = true;
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!satisfying.at(times[i])[tuple[i]]) {
                all = false;
                break;
            }
        }
        if (all) total += count;
    }
    return rational(total, static_cast<long long>(ds.size()));
}

// Delta entails Omega empirically: every evidence of every maximal founded
// subset of Delta is an evidence of Omega. Equivalent to p(Omega|Delta) = 1
// in limit mode; both routes are computed and must agree.
inline bool empirical_consequence(const dataset& ds, const condition& delta,
                                  const condition& omega) {
    const mfs_result res = mfs(ds, delta);
    if (res.max_count == 0) {
        throw unfounded_condition();
    }
    std::vector<bool> omega_evidence(ds.size(), false);
    for (std::size_t k : evidence(ds, omega)) omega_evidence[k] = true;

    bool subset_route = true;
    for (const auto& s : res.subsets) {
        for (std::size_t k : evidence(ds, s)) {
            if (!omega_evidence[k]) {
                subset_route = false;
                break;
            }
        }
        if (!subset_route) break;
    }
    const bool ratio_route = conditional(ds, omega, delta, mu::limit()).ratio() == rational(1);
    if (subset_route != ratio_route) {
        throw error("empirical consequence routes disagree"); // unreachable
    }
    return subset_route;
}

} // namespace datacheck
