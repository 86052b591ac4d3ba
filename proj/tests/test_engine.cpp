#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "datacheck/engine.hpp"
#include "datacheck/parser.hpp"

#include "generators.hpp"
#include "helpers.hpp"

using namespace datacheck;
using testutil::maze;
using testutil::obs;
using testutil::weather;
using testutil::operator+;

namespace {

std::vector<std::string> ids_of(const dataset& ds, const std::vector<std::size_t>& ks) {
    std::vector<std::string> out;
    for (std::size_t k : ks) out.push_back(ds.sequence(k).id);
    return out;
}

// canonical content key for comparing condition multisets
std::multiset<std::pair<int, std::string>> content(const condition& c) {
    std::multiset<std::pair<int, std::string>> out;
    for (const auto& item : c) out.insert({item.time, item.f->str()});
    return out;
}

} // namespace

TEST_CASE("satisfied counts weigh items with multiplicity") {
    // O1=0011 and O2=0000 as 8 literals: d1 satisfies 5 of them
    const condition delta = obs("0011", 1) + obs("0000", 2);
    CHECK(satisfied_count(maze(), 0, delta) == 5);
    CHECK(satisfied_count(maze(), 1, delta) == 5);
    CHECK(satisfied_count(maze(), 2, delta) == 5);
    CHECK(satisfied_count(maze(), 3, delta) == 4);
    CHECK(satisfied_count(maze(), 4, delta) == 4);

    CHECK(satisfied_count(maze(), 0, {}) == 0);

    // weather d2 at time 3 is m3, which satisfies only r
    CHECK(satisfied_count(weather(), 1, parse_condition("r@3, w@3")) == 1);

    // duplicates count twice
    CHECK(satisfied_count(weather(), 1, parse_condition("r@3, r@3")) == 2);

    CHECK_THROWS_AS(satisfied_count(maze(), 0, parse_condition("N@7")), index_out_of_range);
}

TEST_CASE("evidence golden cases") {
    CHECK(ids_of(maze(), evidence(maze(), obs("1011", 1))) ==
          std::vector<std::string>{"d1", "d2", "d3"});
    CHECK(evidence(maze(), {}).size() == 5);
    CHECK(evidence(maze(), obs("0011", 1) + obs("0000", 2)).empty());
}

TEST_CASE("monotonicity: growing the condition shrinks the evidence") {
    std::mt19937_64 rng(7101);
    for (int i = 0; i < 200; ++i) {
        const dataset ds = testutil::random_dataset(rng);
        condition small = testutil::random_condition(rng, ds, 4);
        condition big = small + testutil::random_condition(rng, ds, 3);
        const auto small_ev = evidence(ds, small);
        for (std::size_t k : evidence(ds, big)) {
            CHECK(std::find(small_ev.begin(), small_ev.end(), k) != small_ev.end());
        }
    }
}

TEST_CASE("maximal founded subsets of the broken-sensor condition") {
    const condition delta = obs("0011", 1) + obs("0000", 2);
    const mfs_result res = mfs(maze(), delta);
    CHECK(res.max_count == 5);
    CHECK(ids_of(maze(), res.prime_evidence) == std::vector<std::string>{"d1", "d2", "d3"});
    REQUIRE(res.subsets.size() == 2);
    // S1 = {ESW1=011, SW2=00}, S2 = {ESW1=011, EW2=00}
    CHECK(content(res.subsets[0]) == content(parse_condition("!E@1, S@1, W@1, !S@2, !W@2")));
    CHECK(content(res.subsets[1]) == content(parse_condition("!E@1, S@1, W@1, !E@2, !W@2")));
}

TEST_CASE("maximal founded subset of the inconsistent condition") {
    const condition delta = obs("0011", 1) + obs("0000", 2) + obs("0100", 2);
    const mfs_result res = mfs(maze(), delta);
    CHECK(res.max_count == 8);
    CHECK(ids_of(maze(), res.prime_evidence) == std::vector<std::string>{"d1", "d2"});
    REQUIRE(res.subsets.size() == 1);
    CHECK(content(res.subsets[0]) ==
          content(parse_condition("!E@1, S@1, W@1, !S@2, !W@2, E@2, !S@2, !W@2")));
}

TEST_CASE("a condition with no founded singleton reports c = 0") {
    // L_f and L_h are never visited
    const condition delta = parse_condition("L_f@1, L_h@2");
    const mfs_result res = mfs(maze(), delta);
    CHECK(res.max_count == 0);
    CHECK(res.prime_evidence.empty());
    CHECK(res.subsets.empty());
}

TEST_CASE("founded conditions keep their full evidence as prime") {
    const condition delta = obs("1011", 1);
    const mfs_result res = mfs(maze(), delta);
    CHECK(res.max_count == 4);
    CHECK(ids_of(maze(), res.prime_evidence) == std::vector<std::string>{"d1", "d2", "d3"});
    REQUIRE(res.subsets.size() == 1);
    CHECK(content(res.subsets[0]) == content(delta));
}

TEST_CASE("conditional golden cases in limit mode") {
    CHECK(conditional(weather(), parse_condition("w@3"), parse_condition("r@3"), mu::limit())
              .ratio() == rational(2, 3));
    CHECK(conditional(maze(), parse_condition("L_b@2"), obs("0011", 1) + obs("0000", 2),
                      mu::limit())
              .ratio() == rational(1, 3));
    CHECK(conditional(maze(), parse_condition("L_b@2"),
                      obs("0011", 1) + obs("0000", 2) + obs("0100", 2), mu::limit())
              .ratio() == rational(1, 2));

    // a founded condition entails itself
    const condition delta = obs("1011", 1);
    CHECK(conditional(maze(), delta, delta, mu::limit()).ratio() == rational(1));
}

TEST_CASE("conditional finite mode converges to the limit value") {
    struct golden {
        const dataset* ds;
        condition omega;
        condition delta;
    };
    const std::vector<golden> cases = {
        {&weather(), parse_condition("w@3"), parse_condition("r@3")},
        {&maze(), parse_condition("L_b@2"), obs("0011", 1) + obs("0000", 2)},
        {&maze(), parse_condition("L_b@2"), obs("0011", 1) + obs("0000", 2) + obs("0100", 2)},
        {&maze(), parse_condition("L_e@3"), obs("1011", 1) + obs("1100", 2)},
    };
    for (const auto& c : cases) {
        const double exact = conditional(*c.ds, c.omega, c.delta, mu::limit()).value();
        double last_gap = 2.0;
        for (double eps : {1e-2, 1e-4, 1e-6}) {
            const double approx =
                conditional(*c.ds, c.omega, c.delta, mu::finite(1.0 - eps)).value();
            const double gap = std::abs(approx - exact);
            CHECK(gap <= last_gap);
            last_gap = gap;
        }
        CHECK(last_gap < 1e-4);
    }
}

TEST_CASE("finite mode with mu=1 and an impossible condition is an error") {
    const condition delta = obs("0011", 1) + obs("0000", 2);
    CHECK_THROWS_AS(conditional(maze(), parse_condition("L_b@2"), delta, mu::finite(1.0)),
                    unfounded_condition_at_mu_one);
    CHECK_THROWS_AS(posterior_data(maze(), delta, mu::finite(1.0)),
                    unfounded_condition_at_mu_one);
    // founded conditions are fine at mu=1
    CHECK(conditional(maze(), parse_condition("L_a@1"), obs("1011", 1), mu::finite(1.0))
              .value() == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("mu values outside [0,1] are rejected") {
    CHECK_THROWS_AS(mu::finite(-0.1), error);
    CHECK_THROWS_AS(mu::finite(1.5), error);
    CHECK_THROWS_AS(mu::finite(std::nan("")), error);
    CHECK(mu::finite(0.0).value() == 0.0);
    CHECK(mu::finite(1.0).value() == 1.0);
    CHECK(mu::limit().is_limit());
}

TEST_CASE("times outside the horizon are index errors everywhere") {
    CHECK_THROWS_AS(formula_joint(weather(), parse_condition("r@9")), index_out_of_range);
    CHECK_THROWS_AS(marginal(weather(), parse_condition("r@9"), mu::limit()),
                    index_out_of_range);
    CHECK_THROWS_AS(evidence(weather(), parse_condition("r@9")), index_out_of_range);
    CHECK_THROWS_AS(mfs(weather(), parse_condition("r@9")), index_out_of_range);
}

TEST_CASE("marginal golden cases") {
    CHECK(marginal(weather(), parse_condition("r@3"), mu::limit()).ratio() == rational(3, 5));
    CHECK(marginal(maze(), parse_condition("L_q@1"), mu::limit()).ratio() == rational(2, 5));
    CHECK(marginal(maze(), {}, mu::limit()).ratio() == rational(1));
    CHECK(marginal(weather(), {}, mu::finite(0.5)).value() == Catch::Approx(1.0));
}

TEST_CASE("theorem 2 regime: unfounded conditions fall back to the marginal") {
    const condition delta = parse_condition("L_f@1, L_h@2");
    const condition omega = parse_condition("L_q@1");
    CHECK(conditional(maze(), omega, delta, mu::limit()).ratio() ==
          marginal(maze(), omega, mu::limit()).ratio());

    std::mt19937_64 rng(7102);
    for (int i = 0; i < 100; ++i) {
        const dataset ds = testutil::random_dataset(rng);
        const condition bad = testutil::unfounded_condition_for(rng, ds, 4);
        REQUIRE(mfs(ds, bad).max_count == 0);
        const condition target = testutil::random_condition(rng, ds, 2);
        CHECK(conditional(ds, target, bad, mu::limit()).ratio() ==
              marginal(ds, target, mu::limit()).ratio());
    }
}

TEST_CASE("posterior over data golden cases") {
    auto ratios = [](const std::vector<prob>& ps) {
        std::vector<rational> out;
        for (const auto& p : ps) out.push_back(p.ratio());
        return out;
    };

    CHECK(ratios(posterior_data(maze(), obs("1011", 1), mu::limit())) ==
          std::vector<rational>{{1, 3}, {1, 3}, {1, 3}, {0}, {0}});
    CHECK(ratios(posterior_data(maze(), obs("1011", 1) + obs("1100", 2) + obs("0011", 3),
                                mu::limit())) ==
          std::vector<rational>{{1}, {0}, {0}, {0}, {0}});
    CHECK(ratios(posterior_data(maze(), obs("0011", 1) + obs("0000", 2), mu::limit())) ==
          std::vector<rational>{{1, 3}, {1, 3}, {1, 3}, {0}, {0}});
    // totally unfounded: back to the 1/K prior
    CHECK(ratios(posterior_data(maze(), parse_condition("L_f@1, L_h@2"), mu::limit())) ==
          std::vector<rational>{{1, 5}, {1, 5}, {1, 5}, {1, 5}, {1, 5}});
}

TEST_CASE("posterior always sums to exactly one in limit mode") {
    std::mt19937_64 rng(7103);
    for (int i = 0; i < 200; ++i) {
        const dataset ds = testutil::random_dataset(rng);
        condition delta = std::bernoulli_distribution(0.25)(rng)
                              ? testutil::unfounded_condition_for(rng, ds, 3)
                              : testutil::random_condition(rng, ds, 5);
        rational sum(0);
        for (const auto& p : posterior_data(ds, delta, mu::limit())) sum += p.ratio();
        CHECK(sum == rational(1));
    }
}

TEST_CASE("model joint golden cases") {
    const valuation m1 = testutil::val_of(weather(), {});
    const valuation m2 = testutil::val_of(weather(), {"w"});
    CHECK(model_joint(weather(), {{m2, 3}}) == rational(2, 5));
    CHECK(model_joint(weather(), {{m1, 1}, {m1, 2}}) == rational(1, 5));
    CHECK(model_joint(weather(), {}) == rational(1));
}

TEST_CASE("model joint equals the count ratio and marginals sum to one") {
    std::mt19937_64 rng(7104);
    for (int i = 0; i < 100; ++i) {
        const dataset ds = testutil::random_dataset(rng);
        std::uniform_int_distribution<int> pick_time(1, static_cast<int>(ds.horizon()));
        const int t = pick_time(rng);
        const int u = pick_time(rng);
        rational per_time_sum(0);
        for (std::size_t n = 0; n < ds.models().size(); ++n) {
            per_time_sum += model_joint(ds, {{ds.models()[n], t}});
            for (std::size_t o = 0; o < ds.models().size(); ++o) {
                long long hand = 0;
                for (std::size_t k = 0; k < ds.size(); ++k) {
                    if (ds.model_of(k, t) == ds.models()[n] &&
                        ds.model_of(k, u) == ds.models()[o]) {
                        ++hand;
                    }
                }
                CHECK(model_joint(ds, {{ds.models()[n], t}, {ds.models()[o], u}}) ==
                      rational(hand, static_cast<long long>(ds.size())));
            }
        }
        CHECK(per_time_sum == rational(1));
    }
}

TEST_CASE("formula joint golden cases") {
    CHECK(formula_joint(weather(), parse_condition("r@3, w@3")) == rational(2, 5));
    CHECK(formula_joint(weather(), parse_condition("w@3")) == rational(4, 5));
    // an item true in every datum at its time
    CHECK(formula_joint(weather(), parse_condition("(r | !r)@2")) == rational(1));
}

TEST_CASE("formula joint equals the marginal exactly on random instances") {
    std::mt19937_64 rng(7105);
    for (int i = 0; i < 300; ++i) {
        const dataset ds = testutil::random_dataset(rng);
        condition items;
        std::uniform_int_distribution<std::size_t> n_items(0, 4);
        std::uniform_int_distribution<int> pick_time(1, static_cast<int>(ds.horizon()));
        const std::size_t n = n_items(rng);
        for (std::size_t j = 0; j < n; ++j) {
            items.push_back(
                {testutil::random_formula(rng, ds.vocab().atoms(), 3), pick_time(rng)});
        }
        CHECK(formula_joint(ds, items) == marginal(ds, items, mu::limit()).ratio());
    }
}

TEST_CASE("negation complements the marginal") {
    std::mt19937_64 rng(7106);
    for (int i = 0; i < 200; ++i) {
        const dataset ds = testutil::random_dataset(rng);
        std::uniform_int_distribution<int> pick_time(1, static_cast<int>(ds.horizon()));
        const formula_ptr f = testutil::random_formula(rng, ds.vocab().atoms(), 3);
        const int t = pick_time(rng);
        const condition pos{{f, t}};
        const condition neg{{formula::make_not(f), t}};

        // limit mode: exact complement
        CHECK(marginal(ds, pos, mu::limit()).ratio() + marginal(ds, neg, mu::limit()).ratio() ==
              rational(1));

        // finite mode: p(alpha = 0) computed directly equals p(!alpha = 1)
        const double mu_v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        long double direct = 0.0L;
        for (std::size_t k = 0; k < ds.size(); ++k) {
            const bool holds = eval(*f, ds.model_of(k, t), ds.vocab());
            direct += holds ? 1.0L - mu_v : mu_v;
        }
        direct /= static_cast<long double>(ds.size());
        CHECK(marginal(ds, neg, mu::finite(mu_v)).value() ==
              Catch::Approx(static_cast<double>(direct)).margin(1e-12));
    }
}

TEST_CASE("truth values are conditionally independent given the model") {
    std::mt19937_64 rng(7107);
    for (int i = 0; i < 200; ++i) {
        const dataset ds = testutil::random_dataset(rng);
        std::uniform_int_distribution<int> pick_time(1, static_cast<int>(ds.horizon()));
        const int t = pick_time(rng);
        const formula_ptr a = testutil::random_formula(rng, ds.vocab().atoms(), 3);
        const formula_ptr b = testutil::random_formula(rng, ds.vocab().atoms(), 3);
        const double mu_v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);

        auto bern = [&](const formula& f, const valuation& v) -> long double {
            return eval(f, v, ds.vocab()) ? mu_v : 1.0L - mu_v;
        };
        // per-datum product route
        long double by_data = 0.0L;
        for (std::size_t k = 0; k < ds.size(); ++k) {
            by_data += bern(*a, ds.model_of(k, t)) * bern(*b, ds.model_of(k, t));
        }
        by_data /= static_cast<long double>(ds.size());
        // factored route over distinct models
        long double by_models = 0.0L;
        for (std::size_t n = 0; n < ds.models().size(); ++n) {
            const long double weight = static_cast<long double>(ds.model_count(n, t)) /
                                       static_cast<long double>(ds.size());
            by_models += weight * bern(*a, ds.models()[n]) * bern(*b, ds.models()[n]);
        }
        CHECK(std::abs(static_cast<double>(by_data - by_models)) < 1e-12);

        // and the engine's joint agrees with the per-datum route
        const condition both{{a, t}, {b, t}};
        CHECK(marginal(ds, both, mu::finite(mu_v)).value() ==
              Catch::Approx(static_cast<double>(by_data)).margin(1e-12));
    }
}

TEST_CASE("empirical consequence golden cases") {
    const condition three_obs = obs("1011", 1) + obs("1100", 2) + obs("0011", 3);
    CHECK(empirical_consequence(maze(), three_obs, parse_condition("L_e@3")));

    const condition delta = obs("1011", 1);
    CHECK(empirical_consequence(maze(), delta, delta));

    CHECK_FALSE(empirical_consequence(weather(), parse_condition("r@3"), parse_condition("w@3")));

    CHECK_THROWS_AS(
        empirical_consequence(maze(), parse_condition("L_f@1, L_h@2"), parse_condition("L_a@1")),
        unfounded_condition);
}

TEST_CASE("empirical consequence matches p = 1 on random instances") {
    std::mt19937_64 rng(7108);
    int checked = 0;
    while (checked < 100) {
        const dataset ds = testutil::random_dataset(rng);
        const condition delta = testutil::random_condition(rng, ds, 4);
        if (mfs(ds, delta).max_count == 0) continue;
        const condition omega = testutil::random_condition(rng, ds, 2);
        const bool one = conditional(ds, omega, delta, mu::limit()).ratio() == rational(1);
        CHECK(empirical_consequence(ds, delta, omega) == one);
        ++checked;
    }
}
