#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "datacheck/errors.hpp"
#include "datacheck/formula.hpp"

namespace datacheck {

// Ordered atom set. Order is fixed at load time and drives every
// deterministic output (distributions, canonical serialization).
class vocabulary {
public:
    vocabulary(std::vector<std::string> atoms, bool closed_world)
        : atoms_(std::move(atoms)), closed_world_(closed_world) {
        if (atoms_.empty()) {
            throw schema_error("vocabulary must declare at least one atom");
        }
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            validate_name(atoms_[i]);
            if (!index_.emplace(atoms_[i], i).second) {
                throw schema_error("duplicate atom '" + atoms_[i] + "'");
            }
        }
    }

    std::size_t size() const { return atoms_.size(); }
    bool closed_world() const { return closed_world_; }
    const std::vector<std::string>& atoms() const { return atoms_; }
    const std::string& name(std::size_t i) const { return atoms_[i]; }

    std::optional<std::size_t> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t index_of(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw unknown_atom_error(name);
        return it->second;
    }

    static void validate_name(const std::string& name) {
        if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) {
            throw schema_error("atom name '" + name + "' must start with a letter");
        }
        for (char c : name) {
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') {
                throw schema_error("atom name '" + name + "' has illegal character '" +
                                   std::string(1, c) + "'");
            }
        }
    }

private:
    std::vector<std::string> atoms_;
    std::unordered_map<std::string, std::size_t> index_;
    bool closed_world_;
};

// Total truth assignment over a vocabulary, stored positionally.
class valuation {
public:
    valuation() = default;
    explicit valuation(std::size_t atom_count) : bits_(atom_count, 0) {}

    std::size_t size() const { return bits_.size(); }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }

    friend bool operator==(const valuation& a, const valuation& b) { return a.bits_ == b.bits_; }
    friend bool operator!=(const valuation& a, const valuation& b) { return !(a == b); }
    friend bool operator<(const valuation& a, const valuation& b) { return a.bits_ < b.bits_; }

private:
    std::vector<std::uint8_t> bits_;
};

// Evaluate a formula on one valuation; atoms resolve through the vocabulary.
inline bool eval(const formula& f, const valuation& v, const vocabulary& voc) {
    return f.eval([&](const std::string& name) -> bool {
        auto idx = voc.find(name);
        if (!idx) throw unbound_atom_error(name);
        return v[*idx];
    });
}

struct data_sequence {
    std::string id;
    std::vector<valuation> steps; // steps[t-1] is the valuation at time t
};

// The dataset is the sole probability space: K equally likely sequences of
// complete valuations over a shared horizon 1..T. Immutable after load.
class dataset {
public:
    dataset(vocabulary voc, std::vector<data_sequence> sequences)
        : vocab_(std::move(voc)), sequences_(std::move(sequences)) {
        if (sequences_.empty()) {
            throw schema_error("dataset must contain at least one sequence");
        }
        horizon_ = sequences_.front().steps.size();
        if (horizon_ == 0) {
            throw schema_error("sequences must have at least one step");
        }
        for (const auto& s : sequences_) {
            if (s.steps.size() != horizon_) {
                throw ragged_horizon_error(s.id, s.steps.size(), horizon_);
            }
        }
        build_model_index();
    }

    const vocabulary& vocab() const { return vocab_; }
    std::size_t size() const { return sequences_.size(); } // K
    std::size_t horizon() const { return horizon_; }       // T
    const std::vector<data_sequence>& sequences() const { return sequences_; }
    const data_sequence& sequence(std::size_t k) const {
        check_sequence(k);
        return sequences_[k];
    }

    // m(d_k)^t: k is a zero-based sequence position, t is one-based.
    const valuation& model_of(std::size_t k, int t) const {
        check_sequence(k);
        check_time(t);
        return sequences_[k].steps[static_cast<std::size_t>(t - 1)];
    }

    // Distinct valuations observed anywhere in the data, with per-time
    // occurrence counts. Model ids index into models().
    const std::vector<valuation>& models() const { return models_; }
    std::size_t model_id(std::size_t k, int t) const {
        check_sequence(k);
        check_time(t);
        return model_ids_[k][static_cast<std::size_t>(t - 1)];
    }
    std::optional<std::size_t> find_model(const valuation& v) const {
        auto it = model_lookup_.find(v);
        if (it == model_lookup_.end()) return std::nullopt;
        return it->second;
    }
    // Number of sequences instantiating model n at time t (K_n for that t).
    long long model_count(std::size_t model, int t) const {
        check_time(t);
        const auto& per_time = time_counts_[static_cast<std::size_t>(t - 1)];
        return model < per_time.size() ? per_time[model] : 0;
    }

    // K_{n,o,...}: sequences matching every (valuation, time) pair at once.
    // Multiset occurrences count; an empty list matches everything.
    long long joint_model_count(const std::vector<std::pair<valuation, int>>& pairs) const {
        for (const auto& [v, t] : pairs) {
            check_time(t);
            if (v.size() != vocab_.size()) {
                throw index_out_of_range("valuation arity does not match the vocabulary");
            }
        }
        long long count = 0;
        for (const auto& seq : sequences_) {
            bool all = true;
            for (const auto& [v, t] : pairs) {
                if (seq.steps[static_cast<std::size_t>(t - 1)] != v) {
                    all = false;
                    break;
                }
            }
            if (all) ++count;
        }
        return count;
    }

    void check_time(int t) const {
        if (t < 1 || static_cast<std::size_t>(t) > horizon_) {
            throw index_out_of_range("time " + std::to_string(t) + " outside 1.." +
                                     std::to_string(horizon_));
        }
    }
    void check_sequence(std::size_t k) const {
        if (k >= sequences_.size()) {
            throw index_out_of_range("sequence index " + std::to_string(k) +
                                     " outside 0.." + std::to_string(sequences_.size() - 1));
        }
    }

    // --- serialization ----------------------------------------------------

    static dataset load(const nlohmann::json& doc);
    static dataset load(std::istream& in);
    static dataset load_text(const std::string& text);

    // Canonical form: vocabulary order everywhere, true atoms only (the
    // closed-world listing). load(to_json(ds)) reproduces an identical
    // dataset and identical bytes.
    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json doc;
        doc["atoms"] = vocab_.atoms();
        doc["closed_world"] = true;
        auto& seqs = doc["sequences"] = nlohmann::ordered_json::array();
        for (const auto& s : sequences_) {
            nlohmann::ordered_json steps = nlohmann::ordered_json::array();
            for (const auto& v : s.steps) {
                nlohmann::ordered_json names = nlohmann::ordered_json::array();
                for (std::size_t i = 0; i < vocab_.size(); ++i) {
                    if (v[i]) names.push_back(vocab_.name(i));
                }
                steps.push_back(std::move(names));
            }
            seqs.push_back({{"id", s.id}, {"steps", std::move(steps)}});
        }
        return doc;
    }

private:
    void build_model_index() {
        model_ids_.resize(sequences_.size());
        time_counts_.assign(horizon_, {});
        for (std::size_t k = 0; k < sequences_.size(); ++k) {
            model_ids_[k].resize(horizon_);
            for (std::size_t t = 0; t < horizon_; ++t) {
                const valuation& v = sequences_[k].steps[t];
                auto [it, fresh] = model_lookup_.try_emplace(v, models_.size());
                if (fresh) models_.push_back(v);
                const std::size_t id = it->second;
                model_ids_[k][t] = id;
                auto& counts = time_counts_[t];
                if (counts.size() <= id) counts.resize(id + 1, 0);
                ++counts[id];
            }
        }
    }

    vocabulary vocab_;
    std::vector<data_sequence> sequences_;
    std::size_t horizon_ = 0;

    std::vector<valuation> models_;
    std::map<valuation, std::size_t> model_lookup_;
    std::vector<std::vector<std::size_t>> model_ids_;    // [k][t-1] -> model id
    std::vector<std::vector<long long>> time_counts_;    // [t-1][model id] -> K_n
};

inline dataset dataset::load(const nlohmann::json& doc) {
    if (!doc.is_object()) throw schema_error("document root must be an object");
    if (!doc.contains("atoms") || !doc["atoms"].is_array()) {
        throw schema_error("'atoms' must be an array of names");
    }
    if (!doc.contains("closed_world") || !doc["closed_world"].is_boolean()) {
        throw schema_error("'closed_world' must be a boolean");
    }
    if (!doc.contains("sequences") || !doc["sequences"].is_array()) {
        throw schema_error("'sequences' must be an array");
    }

    std::vector<std::string> atoms;
    for (const auto& a : doc["atoms"]) {
        if (!a.is_string()) throw schema_error("atom names must be strings");
        atoms.push_back(a.get<std::string>());
    }
    vocabulary voc(std::move(atoms), doc["closed_world"].get<bool>());

    std::vector<data_sequence> sequences;
    for (const auto& s : doc["sequences"]) {
        if (!s.is_object() || !s.contains("id") || !s.contains("steps") ||
            !s["id"].is_string() || !s["steps"].is_array()) {
            throw schema_error("each sequence needs a string 'id' and array 'steps'");
        }
        data_sequence seq;
        seq.id = s["id"].get<std::string>();
        std::size_t step_no = 0;
        for (const auto& step : s["steps"]) {
            ++step_no;
            if (!step.is_array()) throw schema_error("steps must be arrays of atom entries");
            valuation v(voc.size());
            std::vector<std::uint8_t> assigned(voc.size(), 0);
            for (const auto& entry : step) {
                if (!entry.is_string()) throw schema_error("step entries must be strings");
                std::string name = entry.get<std::string>();
                bool value = true;
                if (!name.empty() && name[0] == '!') { // explicit false assignment
                    value = false;
                    name = name.substr(1);
                }
                const auto idx = voc.find(name);
                if (!idx) throw unknown_atom_error(name);
                if (assigned[*idx] && v[*idx] != value) {
                    throw schema_error("sequence '" + seq.id + "' step " +
                                       std::to_string(step_no) +
                                       " assigns atom '" + name + "' both values");
                }
                assigned[*idx] = 1;
                v.set(*idx, value);
            }
            if (!voc.closed_world()) {
                for (std::size_t i = 0; i < voc.size(); ++i) {
                    if (!assigned[i]) {
                        throw incomplete_valuation_error(seq.id, step_no, voc.name(i));
                    }
                }
            }
            seq.steps.push_back(std::move(v));
        }
        sequences.push_back(std::move(seq));
    }
    return dataset(std::move(voc), std::move(sequences));
}

inline dataset dataset::load(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw schema_error(e.what());
    }
    return load(doc);
}

inline dataset dataset::load_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw schema_error(e.what());
    }
    return load(doc);
}

} // namespace datacheck
