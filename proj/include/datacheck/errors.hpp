#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace datacheck {

// Base class for everything this library throws on purpose.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// --- parsing -----------------------------------------------------------

class syntax_error : public error {
public:
    syntax_error(const std::string& what, std::size_t offset)
        : error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class unknown_token_error : public syntax_error {
public:
    unknown_token_error(char c, std::size_t offset)
        : syntax_error(std::string("illegal character '") + c + "'", offset) {}
};

// --- dataset ingestion --------------------------------------------------

class schema_error : public error {
public:
    explicit schema_error(const std::string& what) : error("schema: " + what) {}
};

class ragged_horizon_error : public error {
public:
    ragged_horizon_error(const std::string& id, std::size_t got, std::size_t want)
        : error("sequence '" + id + "' has " + std::to_string(got) +
                " steps, expected " + std::to_string(want)) {}
};

class unknown_atom_error : public error {
public:
    explicit unknown_atom_error(const std::string& name)
        : error("unknown atom '" + name + "'"), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class incomplete_valuation_error : public error {
public:
    incomplete_valuation_error(const std::string& seq_id, std::size_t step,
                               const std::string& atom)
        : error("sequence '" + seq_id + "' step " + std::to_string(step) +
                " leaves atom '" + atom + "' unassigned (closed_world is false)") {}
};

// --- evaluation / queries ------------------------------------------------

class unbound_atom_error : public error {
public:
    explicit unbound_atom_error(const std::string& name)
        : error("atom '" + name + "' is not bound by the valuation"), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class index_out_of_range : public error {
public:
    explicit index_out_of_range(const std::string& what) : error(what) {}
};

// Finite mode with p(condition) = 0 would divide by zero; limit mode handles
// this case, so point the caller there.
class unfounded_condition_at_mu_one : public error {
public:
    unfounded_condition_at_mu_one()
        : error("condition has probability 0 at this mu; use limit mode") {}
};

// Corollary-style consequence checks need at least one founded singleton.
class unfounded_condition : public error {
public:
    unfounded_condition()
        : error("condition is totally unfounded (no singleton has evidence)") {}
};

// Brute-force enumeration refused: instance too large for the oracle.
class cap_exceeded : public error {
public:
    explicit cap_exceeded(const std::string& what) : error("cap exceeded: " + what) {}
};

} // namespace datacheck
