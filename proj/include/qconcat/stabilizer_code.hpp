#pragma once

// Stabilizer codes encoding one logical qubit, with their encoding operators
// E_σ = ½ P_C σ̄, minimal-weight recovery tables, and decoding operators
// D_σ = (1/|S|) Σ_i f_iσ S_i σ̄ where f_iσ = Σ_j η(S_i, R_j) η(R_j, σ̄).

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qconcat/error.hpp"
#include "qconcat/pauli.hpp"

namespace qconcat {

// Bit g is set when generator g anticommutes with the measured operator.
using Syndrome = std::uint64_t;

class StabilizerCode {
 public:
  StabilizerCode(std::string name, std::vector<PauliOperator> generators, PauliOperator logical_x,
                 PauliOperator logical_z)
      : name_(std::move(name)),
        generators_(std::move(generators)),
        logical_x_(std::move(logical_x)),
        logical_z_(std::move(logical_z)) {
    validate();
  }

  const std::string& name() const { return name_; }
  std::size_t n() const { return logical_x_.size(); }
  const std::vector<PauliOperator>& generators() const { return generators_; }
  std::size_t generator_count() const { return generators_.size(); }
  std::size_t group_order() const { return std::size_t{1} << generators_.size(); }

  const PauliOperator& logical_x() const { return logical_x_; }
  const PauliOperator& logical_z() const { return logical_z_; }
  // Ȳ = i X̄ Z̄.
  PauliOperator logical_y() const { return (logical_x_ * logical_z_).with_phase((logical_x_ * logical_z_).phase() + 1); }

  PauliOperator logical(Pauli sigma) const {
    switch (sigma) {
      case Pauli::I: return PauliOperator(n());
      case Pauli::X: return logical_x_;
      case Pauli::Y: return logical_y();
      case Pauli::Z: return logical_z_;
    }
    return PauliOperator(n());
  }

  // Element i is the product of the generators selected by the bits of i
  // (generator 0 is the least significant bit).
  std::vector<PauliOperator> stabilizer_group() const {
    std::vector<PauliOperator> group;
    group.reserve(group_order());
    for (std::size_t mask = 0; mask < group_order(); ++mask) {
      PauliOperator s(n());
      for (std::size_t g = 0; g < generators_.size(); ++g)
        if (mask >> g & 1U) s = s * generators_[g];
      group.push_back(s);
    }
    return group;
  }

  Syndrome syndrome(const PauliOperator& p) const {
    Syndrome s = 0;
    for (std::size_t g = 0; g < generators_.size(); ++g)
      if (eta(generators_[g], p) == -1) s |= Syndrome{1} << g;
    return s;
  }

 private:
  void validate() const {
    require(logical_x_.size() == logical_z_.size(), name_ + ": logical operators differ in size");
    require(logical_x_.size() > 0, name_ + ": empty register");
    require(generators_.size() + 1 == n(),
            name_ + ": a one-logical-qubit code needs n-1 generators, got " + std::to_string(generators_.size()));
    require(generators_.size() < 63, name_ + ": too many generators");
    for (const auto& g : generators_) {
      require(g.size() == n(), name_ + ": generator " + g.to_string() + " has wrong size");
      require(g.phase() % 2 == 0, name_ + ": generator " + g.to_string() + " is not Hermitian");
    }
    require(logical_x_.phase() % 2 == 0 && logical_z_.phase() % 2 == 0, name_ + ": logical operators must be Hermitian");
    for (std::size_t a = 0; a < generators_.size(); ++a)
      for (std::size_t b = a + 1; b < generators_.size(); ++b)
        require(eta(generators_[a], generators_[b]) == 1,
                name_ + ": generators " + generators_[a].to_string() + " and " + generators_[b].to_string() +
                    " anticommute");
    for (const auto& g : generators_) {
      require(eta(g, logical_x_) == 1, name_ + ": logical X anticommutes with " + g.to_string());
      require(eta(g, logical_z_) == 1, name_ + ": logical Z anticommutes with " + g.to_string());
    }
    require(eta(logical_x_, logical_z_) == -1, name_ + ": logical X and Z must anticommute");
    require(symplectic_rank() == generators_.size(), name_ + ": generators are not independent");
    // -I in the group would make the codespace empty.
    for (const auto& s : stabilizer_group())
      require(!(s.weight() == 0 && s.phase() != 0), name_ + ": stabilizer group contains -I");
  }

  std::size_t symplectic_rank() const {
    std::vector<std::vector<std::uint8_t>> rows;
    for (const auto& g : generators_) {
      std::vector<std::uint8_t> row(2 * n());
      for (std::size_t q = 0; q < n(); ++q) {
        row[q] = g.x(q);
        row[n() + q] = g.z(q);
      }
      rows.push_back(std::move(row));
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < 2 * n() && rank < rows.size(); ++col) {
      auto pivot = std::find_if(rows.begin() + static_cast<long>(rank), rows.end(),
                                [col](const auto& r) { return r[col] != 0; });
      if (pivot == rows.end()) continue;
      std::iter_swap(rows.begin() + static_cast<long>(rank), pivot);
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (r != rank && rows[r][col])
          for (std::size_t c = 0; c < 2 * n(); ++c) rows[r][c] ^= rows[rank][c];
      ++rank;
    }
    return rank;
  }

  std::string name_;
  std::vector<PauliOperator> generators_;
  PauliOperator logical_x_;
  PauliOperator logical_z_;
};

// The same code with X̄ and Z̄ exchanged (a logical Hadamard relabeling).
inline StabilizerCode swap_logicals(const StabilizerCode& code, std::string name) {
  return StabilizerCode(std::move(name), code.generators(), code.logical_z(), code.logical_x());
}

namespace detail {

inline std::vector<PauliOperator> parse_all(std::initializer_list<std::string_view> strings) {
  std::vector<PauliOperator> out;
  for (auto s : strings) out.push_back(PauliOperator::parse(s));
  return out;
}

}  // namespace detail

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> kNames = {"trivial", "bitflip", "phaseflip", "shor",
                                                  "shor_prime", "steane", "five_bit"};
  return kNames;
}

// Builtin codes. Generator order is part of each definition; syndromes are
// bit vectors in that order.
//   bitflip     |0> -> |000>, |1> -> |111>
//   phaseflip   |±> -> |±±±>
//   shor        |±> -> (|000> ± |111>)^⊗3 / √8
//   shor_prime  |0>, |1> -> (|000> ± |111>)^⊗3 / √8 (shor with X̄, Z̄ exchanged)
inline StabilizerCode builtin(std::string_view name) {
  using detail::parse_all;
  if (name == "trivial") return StabilizerCode("trivial", {}, PauliOperator::parse("X"), PauliOperator::parse("Z"));
  if (name == "bitflip")
    return StabilizerCode("bitflip", parse_all({"ZZI", "IZZ"}), PauliOperator::parse("XXX"), PauliOperator::parse("ZZZ"));
  if (name == "phaseflip")
    return StabilizerCode("phaseflip", parse_all({"XXI", "IXX"}), PauliOperator::parse("XXX"),
                          PauliOperator::parse("ZZZ"));
  if (name == "shor" || name == "shor_prime") {
    auto gens = parse_all({"ZZIIIIIII", "IZZIIIIII", "IIIZZIIII", "IIIIZZIII", "IIIIIIZZI", "IIIIIIIZZ",
                           "XXXXXXIII", "IIIXXXXXX"});
    auto all_x = PauliOperator::parse("XXXXXXXXX");
    auto all_z = PauliOperator::parse("ZZZZZZZZZ");
    if (name == "shor") return StabilizerCode("shor", std::move(gens), all_x, all_z);
    return StabilizerCode("shor_prime", std::move(gens), all_z, all_x);
  }
  if (name == "steane")
    return StabilizerCode("steane",
                          parse_all({"IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ"}),
                          PauliOperator::parse("XXXXXXX"), PauliOperator::parse("ZZZZZZZ"));
  if (name == "five_bit")
    return StabilizerCode("five_bit", parse_all({"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"}),
                          PauliOperator::parse("XXXXX"), PauliOperator::parse("ZZZZZ"));
  throw InvalidInput("unknown code: " + std::string(name));
}

// Code text format: one Pauli string per line; all lines but the last two are
// generators, then logical X, then logical Z. '#' starts a comment; a first
// comment of the form "# name: <label>" names the code.
inline StabilizerCode parse_code(std::istream& in, std::string default_name = "custom") {
  std::vector<std::string> lines;
  std::string name = std::move(default_name);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) {
      std::string comment = line.substr(hash + 1);
      auto key = comment.find("name:");
      if (key != std::string::npos) {
        std::string label = comment.substr(key + 5);
        label.erase(0, label.find_first_not_of(" \t"));
        label.erase(label.find_last_not_of(" \t\r") + 1);
        if (!label.empty()) name = label;
      }
      line.erase(hash);
    }
    line.erase(0, line.find_first_not_of(" \t\r"));
    if (auto end = line.find_last_not_of(" \t\r"); end != std::string::npos) line.erase(end + 1);
    if (!line.empty()) lines.push_back(line);
  }
  require(lines.size() >= 2, "code file needs at least logical X and logical Z lines");
  std::vector<PauliOperator> gens;
  for (std::size_t i = 0; i + 2 < lines.size(); ++i) gens.push_back(PauliOperator::parse(lines[i]));
  return StabilizerCode(name, std::move(gens), PauliOperator::parse(lines[lines.size() - 2]),
                        PauliOperator::parse(lines.back()));
}

inline StabilizerCode load_code(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open code file: " + path);
  return parse_code(in, path);
}

inline void write_code(std::ostream& out, const StabilizerCode& code) {
  out << "# name: " << code.name() << "\n";
  for (const auto& g : code.generators()) out << g.to_string() << "\n";
  out << code.logical_x().to_string() << "\n" << code.logical_z().to_string() << "\n";
}

// Resolves a builtin name or, failing that, a path to a code file.
inline StabilizerCode resolve_code(const std::string& name_or_path) {
  const auto& names = builtin_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return builtin(name_or_path);
  std::ifstream probe(name_or_path);
  require(static_cast<bool>(probe), "unknown code: " + name_or_path);
  return load_code(name_or_path);
}

// P_C = (1/|S|) Σ_i S_i.
inline OperatorSum codespace_projector(const StabilizerCode& code) {
  OperatorSum p(code.n());
  const Rational weight(1, static_cast<unsigned long>(code.group_order()));
  for (const auto& s : code.stabilizer_group()) p.add_term(s, weight);
  return p;
}

// {E_I, E_X, E_Y, E_Z} with E_σ = ½ P_C σ̄.
inline std::array<OperatorSum, 4> encoding_ops(const StabilizerCode& code) {
  const OperatorSum projector = codespace_projector(code);
  std::array<OperatorSum, 4> ops;
  for (Pauli sigma : kPaulis) ops[pauli_index(sigma)] = multiply(projector, code.logical(sigma)) * Rational(1, 2);
  return ops;
}

class RecoveryTable {
 public:
  RecoveryTable(std::size_t generator_count, std::vector<PauliOperator> recoveries)
      : generator_count_(generator_count), recoveries_(std::move(recoveries)) {
    require(recoveries_.size() == (std::size_t{1} << generator_count_), "recovery table must be total");
  }

  std::size_t size() const { return recoveries_.size(); }
  const PauliOperator& operator[](Syndrome s) const { return recoveries_.at(s); }
  const std::vector<PauliOperator>& entries() const { return recoveries_; }

 private:
  std::size_t generator_count_;
  std::vector<PauliOperator> recoveries_;
};

namespace detail {

// Rank of a letter in the tie-break order I < X < Z < Y.
inline int tie_break_rank(Pauli p) {
  switch (p) {
    case Pauli::I: return 0;
    case Pauli::X: return 1;
    case Pauli::Z: return 2;
    case Pauli::Y: return 3;
  }
  return 0;
}

}  // namespace detail

// Minimal-weight recovery for every syndrome. Candidates are visited by
// weight, then by number of Y factors, then lexicographically with
// I < X < Z < Y and qubit 0 most significant; the first hit wins.
inline RecoveryTable recovery_table(const StabilizerCode& code) {
  const std::size_t n = code.n();
  const std::size_t total = code.group_order();
  std::vector<PauliOperator> table(total);
  std::vector<bool> filled(total, false);
  std::size_t remaining = total;

  struct Candidate {
    std::size_t y_count;
    std::vector<int> ranks;
    PauliOperator op;
  };

  for (std::size_t w = 0; w <= n && remaining > 0; ++w) {
    std::vector<Candidate> candidates;
    // Enumerate supports of size w, then letter assignments on the support.
    std::vector<std::size_t> support(w);
    std::iota(support.begin(), support.end(), 0);
    while (true) {
      std::size_t assignments = 1;
      for (std::size_t k = 0; k < w; ++k) assignments *= 3;
      for (std::size_t a = 0; a < assignments; ++a) {
        PauliOperator p(n);
        std::size_t code_word = a;
        std::size_t y_count = 0;
        for (std::size_t k = 0; k < w; ++k) {
          Pauli letter = kNonIdentityPaulis[code_word % 3];
          code_word /= 3;
          p.set(support[k], letter);
          if (letter == Pauli::Y) ++y_count;
        }
        const Syndrome s = code.syndrome(p);
        if (filled[s]) continue;
        std::vector<int> ranks(n);
        for (std::size_t q = 0; q < n; ++q) ranks[q] = detail::tie_break_rank(p.letter(q));
        candidates.push_back({y_count, std::move(ranks), std::move(p)});
      }
      // Next combination.
      std::size_t i = w;
      while (i > 0 && support[i - 1] == n - w + i - 1) --i;
      if (i == 0) break;
      ++support[i - 1];
      for (std::size_t j = i; j < w; ++j) support[j] = support[j - 1] + 1;
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.y_count != b.y_count) return a.y_count < b.y_count;
      return a.ranks < b.ranks;
    });
    for (auto& c : candidates) {
      const Syndrome s = code.syndrome(c.op);
      if (filled[s]) continue;
      filled[s] = true;
      table[s] = std::move(c.op);
      --remaining;
    }
  }
  require(remaining == 0, code.name() + ": recovery table is not total");
  return RecoveryTable(code.generator_count(), std::move(table));
}

struct DecodingOperators {
  std::array<OperatorSum, 4> ops;
  // f[σ][i] = Σ_j η(S_i, R_j) η(R_j, σ̄) with S_i in stabilizer_group() order.
  std::array<std::vector<long>, 4> f;
};

inline DecodingOperators decoding_ops(const StabilizerCode& code, const RecoveryTable& table) {
  require(table.size() == code.group_order(), code.name() + ": recovery table size mismatch");
  const auto group = code.stabilizer_group();
  const Rational weight(1, static_cast<unsigned long>(code.group_order()));
  DecodingOperators out;
  for (Pauli sigma : kPaulis) {
    const PauliOperator logical = code.logical(sigma);
    auto& f = out.f[pauli_index(sigma)];
    f.resize(group.size());
    std::vector<int> eta_logical(table.size());
    for (std::size_t j = 0; j < table.size(); ++j) eta_logical[j] = eta(table[j], logical);
    OperatorSum d(code.n());
    for (std::size_t i = 0; i < group.size(); ++i) {
      long fi = 0;
      for (std::size_t j = 0; j < table.size(); ++j) fi += eta(group[i], table[j]) * eta_logical[j];
      f[i] = fi;
      if (fi != 0) d.add_term(group[i] * logical, weight * fi);
    }
    out.ops[pauli_index(sigma)] = std::move(d);
  }
  return out;
}

inline DecodingOperators decoding_ops(const StabilizerCode& code) { return decoding_ops(code, recovery_table(code)); }

}  // namespace qconcat
